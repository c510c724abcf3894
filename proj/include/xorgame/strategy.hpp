#pragma once

#include <vector>

#include "xorgame/algebra.hpp"
#include "xorgame/games.hpp"
#include "xorgame/linalg.hpp"
#include "xorgame/solver.hpp"

namespace xorgame {

/// Observables A_i on C^d1 and B_j on C^d2 with a shared state psi in
/// C^d1 (x) C^d2. psi[a * d2 + b] is the amplitude of |a>|b>.
class QuantumStrategy {
 public:
  /// Throws NonHermitianObservable unless every observable is Hermitian and
  /// squares to the identity within 1e-9, and InvalidArgument unless
  /// |psi| = 1 within 1e-12.
  QuantumStrategy(std::vector<CMat> a, std::vector<CMat> b, CVec psi);

  const std::vector<CMat>& a() const { return a_; }
  const std::vector<CMat>& b() const { return b_; }
  const CVec& psi() const { return psi_; }
  Eigen::Index d1() const { return d1_; }
  Eigen::Index d2() const { return d2_; }

 private:
  std::vector<CMat> a_;
  std::vector<CMat> b_;
  CVec psi_;
  Eigen::Index d1_ = 1;
  Eigen::Index d2_ = 1;
};

/// lambda (d2 x d1) with lambda(b, a) = psi[a * d2 + b], so that
/// psi = sum_a |a> (x) lambda |a>.
CMat psi_to_lambda(const CVec& psi, Eigen::Index d1, Eigen::Index d2);
CVec lambda_to_psi(const CMat& lambda);

struct Marginal {
  std::vector<CMat> b;
  CMat rho;     // lambda lambda^*
  CMat lambda;  // d2 x d1
};

/// Real correlation matrix <psi| A_i (x) B_j |psi>.
Mat correlations(const QuantumStrategy& s);

double evaluate_bias(const Game& game, const QuantumStrategy& s);

/// Von Neumann entropy (base 2) of the reduced state of psi.
double entanglement_entropy(const CVec& psi, Eigen::Index d1, Eigen::Index d2);

Marginal marginal_of(const QuantumStrategy& s);

/// Builds an optimal strategy from a certified vector solution. The Bob
/// vectors are written in an orthonormal basis of their span (of dimension
/// r', taken from the certificate when it is strongly Clifford) and mapped
/// onto r' anticommuting involutions; the state is maximally entangled.
QuantumStrategy synthesize_optimal(const Game& game, const SdpSolution& sol, const CliffordCertificate& cert);

struct TensorCommuteResidual {
  double lhs = 0.0;         // |(A (x) I - I (x) B) psi|
  double rhs = 0.0;         // |lambda conj(A) - B lambda|_F
  double commutator = 0.0;  // |rho B - B rho|_F
  bool commutator_ok = true;  // commutator <= 2 lhs
};

TensorCommuteResidual tensorcommute_residual(const CMat& a, const CMat& b, const CVec& psi, Eigen::Index d1,
                                             Eigen::Index d2);

/// True when the B-words applied to the columns of lambda span C^d2 and the
/// conj(A)-words applied to the columns of lambda^* span C^d1.
bool check_nondegenerate(const QuantumStrategy& s, double tol = 1e-9);

}  // namespace xorgame
