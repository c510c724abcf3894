#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xorgame/algebra.hpp"
#include "xorgame/games.hpp"
#include "xorgame/linalg.hpp"
#include "xorgame/solver.hpp"
#include "xorgame/strategy.hpp"

namespace xorgame {

struct DefectReport {
  std::vector<std::pair<std::string, double>> per_relation;
  double max_defect = 0.0;
  bool norm_ok = true;  // |B_j| <= 1 + 1e-9
};

DefectReport defect(const SolutionAlgebra& alg, const std::vector<CMat>& b);

/// Defect against the Clifford relations B_i^2 = I, B_i B_j + B_j B_i = 0.
DefectReport clifford_defect(const std::vector<CMat>& b);

struct GapSplit {
  CMat p1;
  CMat p2;
  CMat w1;  // orthonormal basis of range(P1)
  CMat w2;
  double tau = 0.0;  // |rho - I/d|
  double gap = 0.0;  // largest gap between consecutive eigenvalues
};

struct GapSplitResult {
  GapSplit split;
  std::vector<double> commutators;  // |rho S - S rho|_F
  std::vector<double> residuals;    // |P1 S P1 + P2 S P2 - S|_F
  std::vector<double> bounds;       // commutator * d / tau
  bool all_hold = true;
};

/// Splits C^d at the largest gap of the spectrum of rho (the first one in
/// descending order on ties). Throws MaximallyMixed when rho = I/d.
GapSplitResult eigengap_split(const CMat& rho, const std::vector<CMat>& s);

struct ExtractOptions {
  double c0_scale = 1.0;  // multiplies sqrt(10) (m+n)^{1/4}; experimentation only
};

struct ExtractResult {
  CMat p;       // projection, d x d
  CMat basis;   // orthonormal basis of range(P)
  bool identity = true;
  double tau = 0.0;
  double tau0 = 0.0;
  double bound = 0.0;  // 15 (m+n)^{1/8} d^{3/2} eps^{1/8}
  DefectReport report;  // for the compressions of B_j to range(P)
  bool holds = true;
};

/// Recovers an approximate representation of the solution algebra from the
/// marginal of an eps-optimal strategy. Requires eps < min_j d_j^16 / (100(m+n)).
ExtractResult extract_approx_rep(const Game& game, const MarginalBiases& biases, const Marginal& marg, double eps,
                                 const ExtractOptions& opts = {});
ExtractResult extract_approx_rep(const Game& game, const Marginal& marg, double eps, const ExtractOptions& opts = {});

struct RoundOptions {
  bool enforce_radius = true;  // throw DefectTooLarge when eps >= 1/(250 r^2)
};

struct RoundResult {
  std::vector<CMat> b;  // exact representation
  double dist = 0.0;    // max_i |B_i - B'_i|
  double eps = 0.0;     // Clifford defect of the input
  double bound = 0.0;   // 5 r^2 eps / 2
  double radius = 0.0;  // 1 / (250 r^2)
  bool within_radius = true;
  double result_defect = 0.0;
  int multiplicity_split = 0;  // copies of the first irrep (odd r)
  bool holds = true;           // dist <= bound
};

/// Moves an approximate Clifford representation to an exact one of the same
/// dimension by averaging over the finite group generated by the rounded
/// operators. Throws NoExactRep when 2^floor(r/2) does not divide d.
RoundResult round_to_exact(const std::vector<CMat>& b, int r, const RoundOptions& opts = {});

struct SeesawOptions {
  int seeds = 8;
  int iters = 500;
  std::uint64_t seed = 0;
  double tol = 1e-13;  // stop when one full round improves the bias by less
};

struct SeesawResult {
  double value = 0.0;
  std::optional<QuantumStrategy> strategy;
  int best_seed = 0;
};

/// Alternating maximization over Alice's observables, Bob's observables and
/// the state, all at local dimension d. `warm` (of dimension <= d) is padded
/// with an identity block and used as an extra starting point.
SeesawResult seesaw(const Game& game, Eigen::Index d, const SeesawOptions& opts,
                    const QuantumStrategy* warm = nullptr);
double seesaw_bias(const Game& game, Eigen::Index d, int seeds, int iters, std::uint64_t seed = 0);

/// Values for d = 1..max_dim where each dimension is warm-started from the
/// previous best, so the sequence is non-decreasing.
std::vector<double> seesaw_nested(const Game& game, Eigen::Index max_dim, const SeesawOptions& opts);

/// Pads a strategy to local dimension d with identity observables; the state
/// gets zero weight on the new block.
QuantumStrategy embed_strategy(const QuantumStrategy& s, Eigen::Index d);

struct SweepRow {
  double eps = 0.0;
  std::optional<long> measured_min_dim;
  double bound_dim = 0.0;
  double seesaw_value = 0.0;  // at the measured minimal dimension
  double certified_eps_q = 0.0;
  int seeds = 0;
  int iters = 0;
  bool holds = true;  // measured >= bound
};

/// Corollary lower bound min(C'' eps^{-1/12}, 2^floor(r/2)) with
/// C' = 15 (m+n)^{1/8}, delta = 1/(250 r^2) and C'' = (C'/delta)^{-2/3}.
double dimension_lower_bound(long m, long n, int r, double eps);

std::vector<SweepRow> dimension_sweep(const Game& game, const CliffordCertificate& cert, double eps_q,
                                      const std::vector<double>& eps_grid, const SeesawOptions& opts);

struct VectRankRow {
  int z = 0;
  int rank = 0;
  double deficit = 0.0;
  double floor = 0.0;  // n - 8 sqrt(2) n (n-1) deficit
  bool holds = true;
};

struct VectRankReport {
  int n = 0;
  std::vector<VectRankRow> rows;
  double eps = 0.0;
  double floor_at_eps = 0.0;  // the same floor evaluated at the supplied eps
  bool all_hold = true;
};

/// Truncates the optimal Bob Gram matrix of chsh_game(n) to rank n - z in a
/// seeded random orthonormal basis, renormalizes the diagonal, and checks the
/// vector-rank bound against the measured bias deficit for z = 0..n-1.
VectRankReport vect_rank_bound_check(int n, double eps, std::uint64_t seed = 0);

}  // namespace xorgame
