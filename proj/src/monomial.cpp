#include "xorgame/monomial.hpp"

#include "xorgame/error.hpp"

namespace xorgame {

MonomialMatrix::MonomialMatrix(std::vector<std::uint32_t> cols, std::vector<std::uint8_t> phases)
    : cols_(std::move(cols)), phases_(std::move(phases)) {
  if (cols_.size() != phases_.size()) throw Error(ErrorCode::DimensionMismatch, "cols and phases differ in length");
  std::vector<bool> seen(cols_.size(), false);
  for (std::size_t r = 0; r < cols_.size(); ++r) {
    if (cols_[r] >= cols_.size() || seen[cols_[r]])
      throw Error(ErrorCode::InvalidArgument, "column pattern is not a permutation");
    seen[cols_[r]] = true;
    phases_[r] &= 3;
  }
}

MonomialMatrix MonomialMatrix::identity(std::size_t dim) {
  std::vector<std::uint32_t> cols(dim);
  for (std::size_t r = 0; r < dim; ++r) cols[r] = static_cast<std::uint32_t>(r);
  return MonomialMatrix(std::move(cols), std::vector<std::uint8_t>(dim, 0));
}

MonomialMatrix MonomialMatrix::pauli_x() { return MonomialMatrix({1, 0}, {0, 0}); }
MonomialMatrix MonomialMatrix::pauli_y() { return MonomialMatrix({1, 0}, {3, 1}); }
MonomialMatrix MonomialMatrix::pauli_z() { return MonomialMatrix({0, 1}, {0, 2}); }

MonomialMatrix MonomialMatrix::operator*(const MonomialMatrix& rhs) const {
  if (dim() != rhs.dim()) throw Error(ErrorCode::DimensionMismatch, "monomial product of different sizes");
  std::vector<std::uint32_t> cols(dim());
  std::vector<std::uint8_t> phases(dim());
  for (std::size_t r = 0; r < dim(); ++r) {
    const std::uint32_t mid = cols_[r];
    cols[r] = rhs.cols_[mid];
    phases[r] = static_cast<std::uint8_t>((phases_[r] + rhs.phases_[mid]) & 3);
  }
  return MonomialMatrix(std::move(cols), std::move(phases));
}

MonomialMatrix MonomialMatrix::times_i_power(int k) const {
  MonomialMatrix out = *this;
  const int shift = ((k % 4) + 4) % 4;
  for (auto& p : out.phases_) p = static_cast<std::uint8_t>((p + shift) & 3);
  return out;
}

MonomialMatrix MonomialMatrix::adjoint() const {
  std::vector<std::uint32_t> cols(dim());
  std::vector<std::uint8_t> phases(dim());
  for (std::size_t r = 0; r < dim(); ++r) {
    cols[cols_[r]] = static_cast<std::uint32_t>(r);
    phases[cols_[r]] = static_cast<std::uint8_t>((4 - phases_[r]) & 3);
  }
  return MonomialMatrix(std::move(cols), std::move(phases));
}

MonomialMatrix MonomialMatrix::kron(const MonomialMatrix& rhs) const {
  const std::size_t d = rhs.dim();
  std::vector<std::uint32_t> cols(dim() * d);
  std::vector<std::uint8_t> phases(dim() * d);
  for (std::size_t a = 0; a < dim(); ++a)
    for (std::size_t b = 0; b < d; ++b) {
      cols[a * d + b] = static_cast<std::uint32_t>(cols_[a] * d + rhs.cols_[b]);
      phases[a * d + b] = static_cast<std::uint8_t>((phases_[a] + rhs.phases_[b]) & 3);
    }
  return MonomialMatrix(std::move(cols), std::move(phases));
}

CMat MonomialMatrix::to_dense() const {
  static const cplx powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const auto d = static_cast<Eigen::Index>(dim());
  CMat out = CMat::Zero(d, d);
  for (Eigen::Index r = 0; r < d; ++r)
    out(r, cols_[static_cast<std::size_t>(r)]) = powers[phases_[static_cast<std::size_t>(r)]];
  return out;
}

}  // namespace xorgame
