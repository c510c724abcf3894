#pragma once

#include <cmath>

#include "xorgame/algebra.hpp"
#include "xorgame/approx.hpp"
#include "xorgame/games.hpp"
#include "xorgame/solver.hpp"
#include "xorgame/strategy.hpp"

namespace xorgame::testing {

inline CMat block_diag2(const CMat& a, const CMat& b) {
  CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

/// Optimal CHSH strategy on the first block (state weight 1 - delta) next to
/// a second block holding the same strategy with every Bob observable
/// conjugated by exp(-i theta Z / 2) (state weight delta). With
/// `classical_junk`, the second block instead uses B_j = I.
inline QuantumStrategy padded_chsh(const QuantumStrategy& good, double delta, double theta, bool classical_junk = false) {
  const cplx i(0.0, 1.0);
  CMat rot = CMat::Zero(2, 2);
  rot(0, 0) = std::exp(-i * theta / 2.0);
  rot(1, 1) = std::exp(i * theta / 2.0);
  std::vector<CMat> a, b;
  for (const auto& op : good.a()) a.push_back(block_diag2(op, op));
  for (const auto& op : good.b()) {
    const CMat junk = classical_junk ? CMat(CMat::Identity(2, 2)) : CMat(rot * op * rot.adjoint());
    b.push_back(block_diag2(op, junk));
  }
  const CMat lg = psi_to_lambda(good.psi(), 2, 2);
  const CMat lambda = block_diag2(std::sqrt(1.0 - delta) * lg, std::sqrt(delta) * lg);
  return QuantumStrategy(std::move(a), std::move(b), lambda_to_psi(lambda));
}

inline SdpSolution precise_solve(const Game& g, double tol = 1e-12) {
  SolverOptions o;
  o.tol = tol;
  o.step_tol = tol;
  return solve_quantum_bias(g, o);
}

inline QuantumStrategy synthesized(const Game& g, const SdpSolution& sol) {
  return synthesize_optimal(g, sol, strongly_clifford_certificate(build_solution_algebra(g, sol.c)));
}

}  // namespace xorgame::testing
