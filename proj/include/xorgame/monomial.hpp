#pragma once

#include <cstdint>
#include <vector>

#include "xorgame/linalg.hpp"

namespace xorgame {

/// Square matrix with exactly one non-zero entry per row, each a power of
/// the imaginary unit. Row r holds i^phase(r) in column col(r). Products and
/// adjoints are exact, which lets Clifford relations be checked with zero
/// tolerance.
class MonomialMatrix {
 public:
  MonomialMatrix(std::vector<std::uint32_t> cols, std::vector<std::uint8_t> phases);

  static MonomialMatrix identity(std::size_t dim);
  static MonomialMatrix pauli_x();
  static MonomialMatrix pauli_y();
  static MonomialMatrix pauli_z();

  std::size_t dim() const { return cols_.size(); }
  std::uint32_t col(std::size_t r) const { return cols_[r]; }
  std::uint8_t phase(std::size_t r) const { return phases_[r]; }

  MonomialMatrix operator*(const MonomialMatrix& rhs) const;
  MonomialMatrix operator-() const { return times_i_power(2); }
  MonomialMatrix times_i_power(int k) const;
  MonomialMatrix adjoint() const;
  MonomialMatrix kron(const MonomialMatrix& rhs) const;

  bool operator==(const MonomialMatrix&) const = default;
  bool is_hermitian() const { return *this == adjoint(); }
  bool is_identity() const { return *this == identity(dim()); }
  bool anticommutes_with(const MonomialMatrix& other) const { return *this * other == -(other * *this); }

  CMat to_dense() const;

 private:
  std::vector<std::uint32_t> cols_;
  std::vector<std::uint8_t> phases_;  // exponent of i, mod 4
};

}  // namespace xorgame
