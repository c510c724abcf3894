#include "xorgame/strategy.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

constexpr double kInvolutionTol = 1e-9;
constexpr double kStateNormTol = 1e-12;
constexpr double kImagTol = 1e-10;
constexpr double kSpanEigTol = 1e-6;
constexpr int kMaxSynthesisRank = 20;

void check_observables(const std::vector<CMat>& ops, Eigen::Index& dim, const char* side) {
  for (std::size_t k = 0; k < ops.size(); ++k) {
    const CMat& op = ops[k];
    if (op.rows() != op.cols() || (k > 0 && op.rows() != dim))
      throw Error(ErrorCode::DimensionMismatch, std::string(side) + " observables must share one square dimension");
    dim = op.rows();
    const std::string name = std::string(side) + "_" + std::to_string(k + 1);
    if (!is_hermitian(op, kInvolutionTol)) throw Error(ErrorCode::NonHermitianObservable, name + " is not Hermitian");
    if (operator_norm(CMat(op * op - CMat::Identity(dim, dim))) > kInvolutionTol)
      throw Error(ErrorCode::NonHermitianObservable, name + " does not square to the identity");
  }
}

int numerical_rank(const Mat& gram) {
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() > kSpanEigTol).count());
}

// Grows an orthonormal basis of the smallest subspace containing `start` and
// invariant under every operator in `ops`; returns its dimension.
Eigen::Index invariant_span_rank(const std::vector<CMat>& ops, const CMat& start, double tol) {
  const Eigen::Index dim = start.rows();
  CMat basis = column_space_basis(start, tol);
  for (Eigen::Index step = 0; step < dim && basis.cols() < dim; ++step) {
    CMat grown(dim, basis.cols() * static_cast<Eigen::Index>(ops.size() + 1));
    grown.leftCols(basis.cols()) = basis;
    for (std::size_t k = 0; k < ops.size(); ++k)
      grown.middleCols(basis.cols() * static_cast<Eigen::Index>(k + 1), basis.cols()) = ops[k] * basis;
    CMat next = column_space_basis(grown, tol);
    if (next.cols() == basis.cols()) break;
    basis = std::move(next);
  }
  return basis.cols();
}

}  // namespace

QuantumStrategy::QuantumStrategy(std::vector<CMat> a, std::vector<CMat> b, CVec psi)
    : a_(std::move(a)), b_(std::move(b)), psi_(std::move(psi)) {
  d1_ = 1;
  d2_ = 1;
  check_observables(a_, d1_, "A");
  check_observables(b_, d2_, "B");
  if (a_.empty() || b_.empty()) throw Error(ErrorCode::InvalidArgument, "strategy needs observables on both sides");
  if (psi_.size() != d1_ * d2_) throw Error(ErrorCode::DimensionMismatch, "state length must be d1 * d2");
  if (std::abs(psi_.norm() - 1.0) > kStateNormTol) throw Error(ErrorCode::InvalidArgument, "state must be a unit vector");
}

CMat psi_to_lambda(const CVec& psi, Eigen::Index d1, Eigen::Index d2) {
  if (psi.size() != d1 * d2) throw Error(ErrorCode::DimensionMismatch, "state length must be d1 * d2");
  return Eigen::Map<const CMat>(psi.data(), d2, d1);
}

CVec lambda_to_psi(const CMat& lambda) { return Eigen::Map<const CVec>(lambda.data(), lambda.size()); }

Mat correlations(const QuantumStrategy& s) {
  const CMat lambda = psi_to_lambda(s.psi(), s.d1(), s.d2());
  const auto m = static_cast<Eigen::Index>(s.a().size());
  const auto n = static_cast<Eigen::Index>(s.b().size());
  Mat out(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // <psi| A (x) B |psi> = tr(lambda^* B lambda A^T) = sum_ab M_ab A_ab.
    const CMat mj = lambda.adjoint() * s.b()[static_cast<std::size_t>(j)] * lambda;
    for (Eigen::Index i = 0; i < m; ++i) {
      const cplx val = mj.cwiseProduct(s.a()[static_cast<std::size_t>(i)]).sum();
      if (std::abs(val.imag()) > kImagTol)
        throw Error(ErrorCode::NonHermitianObservable, "correlation has a non-negligible imaginary part");
      out(i, j) = val.real();
    }
  }
  return out;
}

double evaluate_bias(const Game& game, const QuantumStrategy& s) {
  if (static_cast<Eigen::Index>(s.a().size()) != game.m() || static_cast<Eigen::Index>(s.b().size()) != game.n())
    throw Error(ErrorCode::DimensionMismatch, "strategy does not match the game size");
  return game.cost().cwiseProduct(correlations(s)).sum();
}

double entanglement_entropy(const CVec& psi, Eigen::Index d1, Eigen::Index d2) {
  Eigen::JacobiSVD<CMat> svd(psi_to_lambda(psi, d1, d2));
  double h = 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    const double p = svd.singularValues()(k) * svd.singularValues()(k);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Marginal marginal_of(const QuantumStrategy& s) {
  Marginal out;
  out.b = s.b();
  out.lambda = psi_to_lambda(s.psi(), s.d1(), s.d2());
  out.rho = out.lambda * out.lambda.adjoint();
  return out;
}

QuantumStrategy synthesize_optimal(const Game& game, const SdpSolution& sol, const CliffordCertificate& cert) {
  if (!sol.certified) throw Error(ErrorCode::NotConverged, "synthesis needs a certified solution");
  if (sol.strategy.v().cols() != game.n() || sol.strategy.u().cols() != game.m())
    throw Error(ErrorCode::DimensionMismatch, "solution does not match the game size");
  if (game.has_zero_row()) throw Error(ErrorCode::ZeroRowBias, "game has a zero row, so some c_i = 0");

  const Mat gram = sol.strategy.bob_gram();
  const int r = cert.strongly_clifford ? cert.rank : numerical_rank(gram);
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "vector span is empty");
  if (r > kMaxSynthesisRank) throw Error(ErrorCode::TooLarge, "vector span rank " + std::to_string(r) + " is too large");

  // Coordinates of v_j in the top-r eigenbasis of the Gram matrix.
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const Eigen::Index n = game.n();
  Mat w(r, n);
  for (int k = 0; k < r; ++k) {
    const Eigen::Index col = n - 1 - k;
    w.row(k) = std::sqrt(std::max(es.eigenvalues()(col), 0.0)) * es.eigenvectors().col(col).transpose();
  }
  for (Eigen::Index j = 0; j < n; ++j) w.col(j).normalize();

  const Mat gw = w * game.cost().transpose();  // column i is sum_j G_ij w_j
  const auto gens = clifford_generators(r, 1);
  const Eigen::Index dim = gens.front().rows();
  std::vector<CMat> b(static_cast<std::size_t>(n), CMat::Zero(dim, dim));
  for (Eigen::Index j = 0; j < n; ++j)
    for (int k = 0; k < r; ++k) b[static_cast<std::size_t>(j)] += w(k, j) * gens[static_cast<std::size_t>(k)];

  std::vector<CMat> a;
  for (Eigen::Index i = 0; i < game.m(); ++i) {
    const double ci = gw.col(i).norm();
    if (ci <= 1e-12) throw Error(ErrorCode::ZeroRowBias, "row " + std::to_string(i + 1) + " has zero marginal bias");
    CMat sum = CMat::Zero(dim, dim);
    for (Eigen::Index j = 0; j < n; ++j)
      if (game.cost()(i, j) != 0.0) sum += game.cost()(i, j) * b[static_cast<std::size_t>(j)];
    a.push_back((sum / ci).conjugate());
  }

  CVec psi = CVec::Zero(dim * dim);
  for (Eigen::Index k = 0; k < dim; ++k) psi(k * dim + k) = 1.0 / std::sqrt(static_cast<double>(dim));
  return QuantumStrategy(std::move(a), std::move(b), std::move(psi));
}

TensorCommuteResidual tensorcommute_residual(const CMat& a, const CMat& b, const CVec& psi, Eigen::Index d1,
                                             Eigen::Index d2) {
  if (a.rows() != d1 || a.cols() != d1 || b.rows() != d2 || b.cols() != d2)
    throw Error(ErrorCode::DimensionMismatch, "observable sizes do not match d1, d2");
  const CMat lambda = psi_to_lambda(psi, d1, d2);
  TensorCommuteResidual out;
  const CMat op = kron(a, CMat::Identity(d2, d2)) - kron(CMat::Identity(d1, d1), b);
  out.lhs = (op * psi).norm();
  out.rhs = (lambda * a.conjugate() - b * lambda).norm();
  const CMat rho = lambda * lambda.adjoint();
  out.commutator = (rho * b - b * rho).norm();
  out.commutator_ok = out.commutator <= 2.0 * out.lhs + 1e-12;
  return out;
}

bool check_nondegenerate(const QuantumStrategy& s, double tol) {
  const CMat lambda = psi_to_lambda(s.psi(), s.d1(), s.d2());
  if (invariant_span_rank(s.b(), lambda, tol) < s.d2()) return false;
  std::vector<CMat> abar;
  for (const auto& a : s.a()) abar.push_back(a.conjugate());
  return invariant_span_rank(abar, lambda.adjoint(), tol) == s.d1();
}

}  // namespace xorgame
