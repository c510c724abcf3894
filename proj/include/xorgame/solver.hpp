#pragma once

#include <cstdint>
#include <vector>

#include "xorgame/games.hpp"
#include "xorgame/linalg.hpp"

namespace xorgame {

/// Unit vectors u_i (columns of u, N x m) and v_j (columns of v, N x n)
/// realizing the correlation c_ij = u_i . v_j.
class VectorStrategy {
 public:
  VectorStrategy(Mat u, Mat v);

  const Mat& u() const { return u_; }
  const Mat& v() const { return v_; }
  Eigen::Index dimension() const { return u_.rows(); }

  Mat correlation() const { return u_.transpose() * v_; }
  Mat bob_gram() const { return v_.transpose() * v_; }

 private:
  Mat u_;
  Mat v_;
};

/// sum_ij G_ij u_i . v_j
double vector_bias(const Game& game, const VectorStrategy& s);

/// Candidate dual point built from a vector strategy:
/// c_i = |sum_j G_ij v_j|, d_j = |sum_i G_ij u_i|, S = diag(c, d)/2 - B.
struct DualCertificate {
  Vec c;
  Vec d;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double slack_min_eig = 0.0;
};

DualCertificate dual_certificate(const Game& game, const VectorStrategy& s);

/// Smallest eigenvalue of diag(c, d)/2 - [[0, G/2], [G^T/2, 0]]. Small
/// problems use a dense eigensolver; large ones bisect on the Schur
/// complement, which only needs n x n factorizations.
double slack_min_eigenvalue(const Mat& g, const Vec& c, const Vec& d);
double slack_min_eigenvalue_dense(const Mat& g, const Vec& c, const Vec& d);
double slack_min_eigenvalue_schur(const Mat& g, const Vec& c, const Vec& d);

struct SolverOptions {
  int rank = 0;  // 0 selects default_rank(m, n)
  int restarts = 8;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double step_tol = 1e-4;  // largest change of any v_j over the final sweep
  long max_iters = 100000;
  double psd_tol = 1e-7;
};

struct SdpSolution {
  VectorStrategy strategy;
  double primal_value = 0.0;
  Vec c;
  Vec d;
  double dual_value = 0.0;
  double gap = 0.0;
  double slack_min_eig = 0.0;
  bool certified = false;
  long sweeps = 0;
  int restart_index = 0;
};

/// min(m, n, smallest N with N(N+1)/2 >= m + n + 1)
int default_rank(Eigen::Index m, Eigen::Index n);

/// Block-coordinate ascent on the elliptope problem max tr(BX), X_ii = 1,
/// with X the Gram matrix of (u, v). Each block update is the closed form
/// u_i <- normalize(sum_j G_ij v_j) (and symmetrically for v), and every
/// restart ends with a dual certificate. Returns the best restart; check
/// `certified` before trusting the value.
SdpSolution solve_quantum_bias(const Game& game, const SolverOptions& opts = {});

/// Objective of the Bob-side reformulation:
/// sum_i sqrt(sum_jk G_ij G_ik V_jk) over V PSD with unit diagonal.
double gamma_value(const Game& game, const Mat& v);

/// Squared marginal row biases c_i^2 = g_i^T V g_i for a Bob-side Gram V.
Vec gamma_row_bias_squares(const Game& game, const Mat& v);

struct MarginalBiases {
  Vec c;
  Vec d;
};

/// Marginal row and column biases from a certified solve; throws
/// NotConverged if no restart certifies.
MarginalBiases marginal_biases(const Game& game, const SolverOptions& opts = {});

struct MbiasReport {
  double epsilon = 0.0;  // eps_q - bias(strategy), with eps_q = sum_i c_i
  double bound = 0.0;    // sqrt(10) (m+n)^{1/4} eps^{1/4}
  Vec residuals;         // |sum_j G_ij v_j - c_i u_i|
  std::vector<bool> holds;
  bool all_hold = true;
};

/// Checks the marginal-bias stability bound for an eps-optimal vector
/// strategy. Requires 0 <= eps < 1/(4(m+n)).
MbiasReport check_mbias_bound(const Game& game, const VectorStrategy& s, const Vec& c);

}  // namespace xorgame
