#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support.hpp"
#include "xorgame/approx.hpp"
#include "xorgame/error.hpp"

using namespace xorgame;
using namespace xorgame::testing;

namespace {

CMat random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMat x(d, d);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = cplx(normal(rng), normal(rng));
  return x + x.adjoint();
}

CMat random_unitary(Eigen::Index d, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMat> qr(random_hermitian(d, rng) + CMat::Identity(d, d) * cplx(0, 1));
  return qr.householderQ();
}

CMat random_density(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMat x(d, d);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = cplx(normal(rng), normal(rng));
  CMat rho = x * x.adjoint();
  return rho / rho.trace().real();
}

std::vector<CMat> with_noise(const std::vector<CMat>& ops, double eta, std::mt19937_64& rng) {
  std::vector<CMat> out;
  for (const auto& op : ops) {
    CMat h = random_hermitian(op.rows(), rng);
    out.push_back(op + h * (eta / operator_norm(h)));
  }
  return out;
}

}  // namespace

TEST(Defect, ExactPerturbedAndZero) {
  const Game g = chsh_game(3);
  const SdpSolution sol = precise_solve(g);
  const SolutionAlgebra alg = build_solution_algebra(g, sol.c);
  const Marginal marg = marginal_of(synthesized(g, sol));
  const DefectReport exact = defect(alg, marg.b);
  EXPECT_LE(exact.max_defect, 1e-8);
  EXPECT_TRUE(exact.norm_ok);
  EXPECT_EQ(exact.per_relation.size(), static_cast<std::size_t>(g.m() + g.n()));

  std::mt19937_64 rng(1);
  const double eta = 1e-3;
  EXPECT_LE(defect(alg, with_noise(marg.b, eta, rng)).max_defect, 5 * eta);

  const DefectReport zero = defect(alg, std::vector<CMat>(3, CMat::Zero(2, 2)));
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(zero.per_relation[j].second, 1.0);
  EXPECT_THROW(defect(alg, {CMat::Identity(2, 2)}), Error);
}

TEST(Defect, UnitaryInvariance) {
  const Game g = tight_game(4);
  const SdpSolution sol = precise_solve(g);
  const SolutionAlgebra alg = build_solution_algebra(g, sol.c);
  std::mt19937_64 rng(2);
  const auto noisy = with_noise(marginal_of(synthesized(g, sol)).b, 1e-3, rng);
  const CMat u = random_unitary(noisy.front().rows(), rng);
  std::vector<CMat> rotated;
  for (const auto& op : noisy) rotated.push_back(u * op * u.adjoint());
  EXPECT_NEAR(defect(alg, noisy).max_defect, defect(alg, rotated).max_defect, 1e-12);
}

TEST(EigengapSplit, Examples) {
  try {
    eigengap_split(CMat::Identity(3, 3) / 3.0, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaximallyMixed);
  }
  CMat rho = CMat::Zero(2, 2);
  rho(0, 0) = 1.0;
  const GapSplitResult r = eigengap_split(rho, {});
  EXPECT_DOUBLE_EQ(r.split.tau, 0.5);
  EXPECT_DOUBLE_EQ(r.split.gap, 1.0);
  EXPECT_LT((r.split.p1 - rho).norm(), 1e-15);

  Vec ev(4);
  ev << 0.4, 0.3, 0.2, 0.1;
  const CMat diag_rho = ev.cast<cplx>().asDiagonal();
  Vec s(4);
  s << 1, -2, 3, 0.5;
  const GapSplitResult d = eigengap_split(diag_rho, {CMat(s.cast<cplx>().asDiagonal())});
  EXPECT_LT(d.residuals[0], 1e-15);
  EXPECT_TRUE(d.all_hold);
  // Equal gaps: the first one in descending order wins, so P1 has rank 1.
  EXPECT_NEAR(d.split.p1.trace().real(), 1.0, 1e-12);
}

TEST(EigengapSplit, RandomResidualBound) {
  std::mt19937_64 rng(3);
  for (Eigen::Index d = 2; d <= 8; ++d)
    for (int t = 0; t < 200; ++t) {
      const CMat rho = random_density(d, rng);
      const GapSplitResult r = eigengap_split(rho, {random_hermitian(d, rng), random_hermitian(d, rng)});
      EXPECT_TRUE(r.all_hold);
      EXPECT_GE(r.split.gap, r.split.tau / double(d));
      EXPECT_LT((r.split.p1 + r.split.p2 - CMat::Identity(d, d)).norm(), 1e-12);
      EXPECT_LT((r.split.p1 * r.split.p2).norm(), 1e-12);
    }
}

TEST(Extract, ExactMarginalGivesIdentity) {
  const Game g = chsh_game(2);
  const SdpSolution sol = precise_solve(g);
  const QuantumStrategy s = synthesized(g, sol);
  const double eps = std::max(0.0, sol.c.sum() - evaluate_bias(g, s));
  const ExtractResult r = extract_approx_rep(g, {sol.c, sol.d}, marginal_of(s), eps);
  EXPECT_TRUE(r.identity);
  EXPECT_LE(r.report.max_defect, 1e-6);
  EXPECT_TRUE(r.holds);
}

TEST(Extract, PaddedBlockIsSplitOff) {
  const Game g = chsh_game(2);
  const SdpSolution sol = precise_solve(g);
  const QuantumStrategy padded = padded_chsh(synthesized(g, sol), 1e-4, 1e-4);
  const double eps = std::max(0.0, sol.c.sum() - evaluate_bias(g, padded));
  EXPECT_GT(eps, 0.0);
  const ExtractResult r = extract_approx_rep(g, {sol.c, sol.d}, marginal_of(padded), eps);
  EXPECT_FALSE(r.identity);
  CMat p1 = CMat::Zero(4, 4);
  p1.topLeftCorner(2, 2).setIdentity();
  EXPECT_LT((r.p - p1).norm(), 1e-8);
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.report.max_defect, r.bound);
}

TEST(Extract, PreconditionViolations) {
  const Game g = chsh_game(2);
  const SdpSolution sol = precise_solve(g);
  const QuantumStrategy good = synthesized(g, sol);
  try {
    extract_approx_rep(g, {sol.c, sol.d}, marginal_of(good), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EpsilonTooLarge);
  }
  const QuantumStrategy crude = padded_chsh(good, 1e-4, 0.0, true);
  const double eps = sol.c.sum() - evaluate_bias(g, crude);
  EXPECT_GT(eps, 1e-6);
  EXPECT_THROW(extract_approx_rep(g, {sol.c, sol.d}, marginal_of(crude), eps), Error);
}

TEST(Round, PerturbedCliffordThree) {
  std::mt19937_64 rng(5);
  const auto exact = clifford_generators(3, 1);
  const auto noisy = with_noise(exact, 1e-4, rng);
  const RoundResult r = round_to_exact(noisy, 3);
  EXPECT_TRUE(r.within_radius);
  EXPECT_LE(r.dist, 5.0 * 9.0 * r.eps / 2.0);
  EXPECT_LE(r.result_defect, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(Round, FixedPointAndObstruction) {
  for (int r = 1; r <= 6; ++r) {
    const RoundResult res = round_to_exact(clifford_generators(r, 2), r);
    EXPECT_LE(res.dist, 1e-10);
    EXPECT_LE(res.result_defect, 1e-12);
  }
  std::vector<CMat> three(2, CMat::Identity(3, 3));
  try {
    round_to_exact(three, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoExactRep);
  }
}

TEST(Round, TracelessBasisChange) {
  // Conjugating by Z gives avg_g psi(g) pi(g)^* = 0, so the identity start is useless here.
  const auto gens = clifford_generators(2, 1);
  CMat z = CMat::Identity(2, 2);
  z(1, 1) = -1.0;
  std::vector<CMat> conj;
  for (const auto& x : gens) conj.push_back(z * x * z);
  const RoundResult r = round_to_exact(conj, 2);
  EXPECT_LE(r.dist, 1e-10);
  EXPECT_LE(r.result_defect, 1e-12);
}

TEST(Round, MixedIrrepsForOddRank) {
  auto plus = clifford_generators(3, 1);
  std::vector<CMat> mixed;
  for (std::size_t i = 0; i < plus.size(); ++i)
    mixed.push_back(block_diag2(plus[i], i + 1 == plus.size() ? CMat(-plus[i]) : plus[i]));
  const RoundResult r = round_to_exact(mixed, 3);
  EXPECT_LE(r.dist, 1e-10);
  EXPECT_EQ(r.multiplicity_split, 1);
}

TEST(Round, RadiusEnforcement) {
  std::mt19937_64 rng(6);
  const auto noisy = with_noise(clifford_generators(4, 1), 1e-3, rng);
  try {
    round_to_exact(noisy, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DefectTooLarge);
  }
  RoundOptions o;
  o.enforce_radius = false;
  const RoundResult r = round_to_exact(noisy, 4, o);
  EXPECT_FALSE(r.within_radius);
  EXPECT_LE(r.result_defect, 1e-12);
}

TEST(Seesaw, ChshValues) {
  const Game g = chsh_game(2);
  EXPECT_NEAR(seesaw_bias(g, 2, 8, 500), 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(seesaw_bias(g, 1, 8, 500), 0.5, 1e-9);
}

TEST(Seesaw, NestedIsMonotoneAndBelowSdp) {
  SeesawOptions o;
  o.seeds = 4;
  o.iters = 300;
  for (const Game& g : {chsh_game(3), tight_game(4)}) {
    const double eps_q = precise_solve(g).primal_value;
    const auto values = seesaw_nested(g, 3, o);
    for (std::size_t k = 0; k < values.size(); ++k) {
      EXPECT_LE(values[k], eps_q + 1e-7);
      if (k > 0) {
        EXPECT_GE(values[k], values[k - 1] - 1e-9);
      }
    }
  }
}

TEST(Sweep, ChshTwo) {
  const Game g = chsh_game(2);
  const SdpSolution sol = precise_solve(g);
  const auto cert = strongly_clifford_certificate(build_solution_algebra(g, sol.c));
  SeesawOptions o;
  const double big = sol.primal_value - classical_bias(g) + 1e-6;
  const auto rows = dimension_sweep(g, cert, sol.primal_value, {1e-3, big}, o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(*rows[0].measured_min_dim, 2);
  EXPECT_TRUE(rows[0].holds);
  EXPECT_EQ(*rows[1].measured_min_dim, 1);
  EXPECT_LE(rows[0].bound_dim, 2.0);
}

TEST(VectRank, TruncationExperiment) {
  const VectRankReport r4 = vect_rank_bound_check(4, 1e-3);
  ASSERT_EQ(r4.rows.size(), 4u);
  EXPECT_NEAR(r4.rows[0].deficit, 0.0, 1e-9);
  EXPECT_EQ(r4.rows[0].rank, 4);
  EXPECT_EQ(r4.rows[1].rank, 3);
  EXPECT_GE(r4.rows[1].deficit, 1.0 / (96.0 * std::sqrt(2.0)));
  EXPECT_TRUE(r4.all_hold);
  const VectRankReport r3 = vect_rank_bound_check(3, 1e-3);
  EXPECT_TRUE(r3.rows[2].holds);
  EXPECT_EQ(r3.rows[2].rank, 1);
}
