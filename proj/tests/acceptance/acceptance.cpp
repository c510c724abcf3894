// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "xorgame/error.hpp"

using namespace xorgame;
using namespace xorgame::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

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

CVec random_state(Eigen::Index len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVec v(len);
  for (Eigen::Index k = 0; k < len; ++k) v(k) = cplx(normal(rng), normal(rng));
  return v.normalized();
}

double tight_value(int n) { return std::sqrt(n / (2.0 * (n - 1))); }

void chsh_value(Outcome& o) {
  const Game g = chsh_game(2);
  const SdpSolution s = solve_quantum_bias(g);
  const double cb = classical_bias(g);
  o.detail << "primal=" << s.primal_value << " gap=" << s.gap << " classical=" << cb;
  o.require(s.certified, "certified");
  o.require(std::abs(s.primal_value - 1.0 / std::sqrt(2.0)) <= 1e-6, "primal = 1/sqrt2");
  o.require(s.gap < 1e-7, "gap < 1e-7");
  o.require(cb == 0.5, "classical = 1/2");
}

void graph_family(Outcome& o) {
  for (int n = 2; n <= 5; ++n) {
    const Game g = chsh_game(n);
    const SdpSolution s = solve_quantum_bias(g);
    const double e = n * (n - 1) / 2.0;
    const double row = 1.0 / (2.0 * std::sqrt(2.0) * e);
    const double row_err = (s.c.array() - row).abs().maxCoeff();
    const double cb = classical_bias(g);
    o.detail << " n=" << n << ":primal=" << s.primal_value << ",row_err=" << row_err << ",classical=" << cb;
    o.require(s.certified, "certified n=" + std::to_string(n));
    o.require(std::abs(s.primal_value - 1.0 / std::sqrt(2.0)) <= 1e-6, "primal n=" + std::to_string(n));
    o.require(row_err <= 1e-6, "row biases n=" + std::to_string(n));
    o.require(std::abs(cb - 0.5) <= 1e-9, "classical n=" + std::to_string(n));
  }
}

void algebra_certification(Outcome& o) {
  for (int n = 2; n <= 6; ++n) {
    const Game g = chsh_game(n);
    const auto cert = strongly_clifford_certificate(build_solution_algebra(g, precise_solve(g).c));
    const long want = 1L << (n / 2);
    o.detail << " chsh" << n << ":rank=" << cert.rank << ",min_dim=" << (cert.min_dim ? *cert.min_dim : -1);
    o.require(cert.strongly_clifford && cert.rank == n && cert.min_dim && *cert.min_dim == want,
              "chsh n=" + std::to_string(n));
  }
  for (int n = 3; n <= 6; ++n) {
    const Game g = tight_game(n);
    const auto cert = strongly_clifford_certificate(build_solution_algebra(g, precise_solve(g).c));
    o.detail << " tight" << n << ":rank=" << cert.rank << ",ebits=" << (cert.ebits ? *cert.ebits : -1);
    o.require(cert.strongly_clifford && cert.rank == n - 1 && cert.ebits && *cert.ebits == (n - 1) / 2,
              "tight n=" + std::to_string(n));
  }
}

void tight_values(Outcome& o) {
  for (int n = 3; n <= 6; ++n) {
    const SdpSolution s = solve_quantum_bias(tight_game(n));
    o.detail << " n=" << n << ":err=" << std::abs(s.primal_value - tight_value(n));
    o.require(s.certified && std::abs(s.primal_value - tight_value(n)) <= 1e-6, "tight n=" + std::to_string(n));
  }
  // Cross-check at n = 3 against a grid over the 3x3 elliptope.
  double best = 0.0;
  const int steps = 120;
  for (int ia = 0; ia <= steps; ++ia)
    for (int ib = 0; ib <= steps; ++ib)
      for (int ic = 0; ic <= steps; ++ic) {
        const double a = -1.0 + 2.0 * ia / steps, b = -1.0 + 2.0 * ib / steps, c = -1.0 + 2.0 * ic / steps;
        if (1.0 + 2.0 * a * b * c - a * a - b * b - c * c < 0.0) continue;
        best = std::max(best, (std::sqrt(2 * (1 - a)) + std::sqrt(2 * (1 - b)) + std::sqrt(2 * (1 - c))) / 6.0);
      }
  o.detail << " grid3=" << best;
  o.require(best <= tight_value(3) + 1e-12 && tight_value(3) - best <= 5e-3, "n=3 grid");
}

void synthesis(Outcome& o) {
  for (int n = 2; n <= 4; ++n) {
    const Game g = chsh_game(n);
    const SdpSolution sol = precise_solve(g);
    const auto cert = strongly_clifford_certificate(build_solution_algebra(g, sol.c));
    const QuantumStrategy s = synthesize_optimal(g, sol, cert);
    const double bias_err = std::abs(evaluate_bias(g, s) - sol.primal_value);
    const double entropy = entanglement_entropy(s.psi(), s.d1(), s.d2());
    const Marginal marg = marginal_of(s);
    const Eigen::Index dim = marg.rho.rows();
    const double rho_err = (marg.rho - CMat::Identity(dim, dim) / double(dim)).cwiseAbs().maxCoeff();
    const double def = defect(build_solution_algebra(g, sol.c), marg.b).max_defect;
    o.detail << " n=" << n << ":bias_err=" << bias_err << ",entropy=" << entropy << ",rho_err=" << rho_err
             << ",defect=" << def;
    const std::string tag = " n=" + std::to_string(n);
    o.require(bias_err <= 1e-8, "bias" + tag);
    o.require(std::abs(entropy - n / 2) <= 1e-9, "entropy" + tag);
    o.require(rho_err <= 1e-10, "rho" + tag);
    o.require(def <= 1e-8, "defect" + tag);
  }
}

void tensor_commutation(Outcome& o) {
  std::mt19937_64 rng(6);
  double worst = 0.0;
  int bad = 0;
  for (Eigen::Index d1 = 2; d1 <= 4; ++d1)
    for (Eigen::Index d2 = 2; d2 <= 4; ++d2)
      for (int t = 0; t < 100; ++t) {
        const auto r = tensorcommute_residual(random_hermitian(d1, rng), random_hermitian(d2, rng),
                                              random_state(d1 * d2, rng), d1, d2);
        worst = std::max(worst, std::abs(r.lhs - r.rhs));
        if (std::abs(r.lhs - r.rhs) > 1e-10) ++bad;
      }
  o.detail << "instances=900 max|lhs-rhs|=" << worst;
  o.require(bad == 0, std::to_string(bad) + " mismatches");
}

void eigengap(Outcome& o) {
  std::mt19937_64 rng(7);
  int bad = 0, total = 0;
  for (Eigen::Index d = 2; d <= 8; ++d)
    for (int t = 0; t < 200; ++t, ++total)
      if (!eigengap_split(random_density(d, rng), {random_hermitian(d, rng)}).all_hold) ++bad;
  o.detail << "pairs=" << total << " violations=" << bad;
  o.require(bad == 0, "residual bound");
}

void clifford_stability(Outcome& o) {
  std::mt19937_64 rng(8);
  RoundOptions opts;
  opts.enforce_radius = false;
  int bad = 0, total = 0, inside = 0;
  double worst_ratio = 0.0;
  for (int r = 2; r <= 6; ++r)
    for (const double eta : {1e-5, 1e-4, 1e-3})
      for (int t = 0; t < 50; ++t, ++total) {
        const auto exact = clifford_generators(r, 1);
        const CMat u = random_unitary(exact.front().rows(), rng);
        std::vector<CMat> noisy;
        for (const auto& x : exact) {
          const CMat h = random_hermitian(x.rows(), rng);
          noisy.push_back(u * x * u.adjoint() + h * (eta / operator_norm(h)));
        }
        const RoundResult res = round_to_exact(noisy, r, opts);
        if (res.within_radius) ++inside;
        if (res.bound > 0) worst_ratio = std::max(worst_ratio, res.dist / res.bound);
        if (!res.holds || res.result_defect > 1e-9) {
          ++bad;
          o.detail << " (r=" << r << ",noise=" << eta << ",eps=" << res.eps << ",dist=" << res.dist
                   << ",bound=" << res.bound << ",within_radius=" << res.within_radius << ")";
        }
      }
  o.detail << "instances=" << total << " within_radius=" << inside << " max dist/bound=" << worst_ratio
           << " violations=" << bad;
  o.require(bad == 0, "distance bound");
}

void extraction(Outcome& o) {
  const Game g = chsh_game(2);
  const SdpSolution sol = precise_solve(g, 1e-13);
  const MarginalBiases mb{sol.c, sol.d};
  const QuantumStrategy good = synthesized(g, sol);
  const double eps_exact = std::max(0.0, sol.c.sum() - evaluate_bias(g, good));
  const ExtractResult exact = extract_approx_rep(g, mb, marginal_of(good), eps_exact);
  o.detail << "exact:P=I:" << exact.identity << ",defect=" << exact.report.max_defect;
  o.require(exact.identity && exact.report.max_defect <= 1e-6, "exact marginal");

  const QuantumStrategy padded = padded_chsh(good, 1e-4, 1e-4);
  const double eps = std::max(0.0, sol.c.sum() - evaluate_bias(g, padded));
  const ExtractResult r = extract_approx_rep(g, mb, marginal_of(padded), eps);
  CMat p1 = CMat::Zero(4, 4);
  p1.topLeftCorner(2, 2).setIdentity();
  const double p_err = (r.p - p1).norm();
  o.detail << " padded:eps=" << eps << ",tau=" << r.tau << ",tau0=" << r.tau0 << ",|P-P1|=" << p_err
           << ",defect=" << r.report.max_defect << ",bound=" << r.bound;
  o.require(!r.identity && p_err <= 1e-8, "P = P1");
  o.require(r.report.max_defect <= r.bound, "defect bound");
}

void dimension_sweep_check(Outcome& o) {
  const Game g = chsh_game(4);
  const SdpSolution sol = precise_solve(g);
  const auto cert = strongly_clifford_certificate(build_solution_algebra(g, sol.c));
  SeesawOptions opts;
  const auto rows = dimension_sweep(g, cert, sol.primal_value, {1e-2, 1e-4, 1e-6}, opts);
  const double d1 = seesaw_bias(g, 1, opts.seeds, opts.iters);
  const double cb = classical_bias(g);
  o.detail << "d1=" << d1 << " classical=" << cb;
  for (const auto& row : rows) {
    o.detail << " eps=" << row.eps << ":min_dim=" << (row.measured_min_dim ? *row.measured_min_dim : -1)
             << ",bound=" << row.bound_dim;
    o.require(row.holds, "lower bound at eps=" + std::to_string(row.eps));
  }
  o.require(rows.back().measured_min_dim && *rows.back().measured_min_dim == 4, "min dim 4 at 1e-6");
  o.require(std::abs(d1 - cb) <= 1e-6, "d=1 equals classical");
}

void cl_examples(Outcome& o) {
  SolverOptions quick;
  const SdpSolution s4 = solve_quantum_bias(cl_game(4), quick);
  Eigen::SelfAdjointEigenSolver<Mat> es(s4.strategy.v().transpose() * s4.strategy.v());
  const long rank4 = (es.eigenvalues().array() > 1e-6).count();
  o.detail << "cl4 gram rank=" << rank4;
  o.require(s4.certified && rank4 >= 3, "cl4 rank >= 3");
  for (const int n : {2, 3, 4, 8}) {
    const Game g = cl_game(n);
    SolverOptions single;
    single.restarts = 1;
    const SdpSolution s = n == 8 ? solve_quantum_bias(g, single) : precise_solve(g);
    std::vector<CMat> b;
    for (const auto& img : cl_monomial_representation(n).images) b.push_back(img.to_dense());
    const double def = verify_relations(build_solution_algebra(g, s.c), b);
    o.detail << " cl" << n << ":dim=" << b.front().rows() << ",defect=" << def;
    o.require(s.certified && def <= 1e-9, "cl" + std::to_string(n) + " relations");
  }
}

void vect_rank(Outcome& o) {
  for (int n = 3; n <= 5; ++n) {
    const VectRankReport r = vect_rank_bound_check(n, 1e-3);
    o.detail << " n=" << n << ":";
    for (const auto& row : r.rows) o.detail << "(z=" << row.z << ",rank=" << row.rank << ",deficit=" << row.deficit << ")";
    o.require(r.all_hold, "n=" + std::to_string(n));
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "CHSH quantum value", 1, chsh_value},
      {2, "graph-game family", 10, graph_family},
      {3, "solution-algebra certification", 10, algebra_certification},
      {4, "tight-game value", 10, tight_values},
      {5, "strategy synthesis", 5, synthesis},
      {6, "tensor-commutation identity", 5, tensor_commutation},
      {7, "eigenvalue-gap split", 10, eigengap},
      {8, "Clifford stability", 30, clifford_stability},
      {9, "approximate-representation extraction", 10, extraction},
      {10, "dimension sweep", 180, dimension_sweep_check},
      {11, "CL(n) examples", 120, cl_examples},
      {12, "vector-rank bound", 10, vect_rank},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail << " [over runtime budget]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s (%.2fs, budget %.0fs):%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
