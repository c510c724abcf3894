#include "xorgame/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "xorgame/algebra.hpp"
#include "xorgame/approx.hpp"
#include "xorgame/error.hpp"
#include "xorgame/games.hpp"
#include "xorgame/io.hpp"
#include "xorgame/solver.hpp"
#include "xorgame/strategy.hpp"

namespace xorgame::cli {

namespace {

struct Config {
  std::string input;
  std::string output;
  std::string format = "csv";
  double tol = 1e-8;
  int restarts = 8;
  std::uint64_t seed = 0;
  int rank = 0;
  int n = 2;
  std::string graph;
  int vertices = 0;
  std::vector<double> eps_grid{1e-2, 1e-4, 1e-6};
  std::vector<double> noise_grid{1e-5};
  int seeds = 8;
  int iters = 500;
};

SolverOptions solver_options(const Config& cfg) {
  SolverOptions o;
  o.tol = cfg.tol;
  o.restarts = cfg.restarts;
  o.seed = cfg.seed;
  o.rank = cfg.rank;
  return o;
}

SdpSolution certified_solve(const Game& game, const Config& cfg, double step_tol = SolverOptions{}.step_tol) {
  SolverOptions opts = solver_options(cfg);
  opts.step_tol = step_tol;
  SdpSolution sol = solve_quantum_bias(game, opts);
  if (!sol.certified)
    throw Error(ErrorCode::NotConverged, "solver did not certify (gap " + format_double(sol.gap) + ", slack min eig " +
                                             format_double(sol.slack_min_eig) + ")");
  return sol;
}

// Marginal biases feed the rank decision on V, whose error scales like the
// square root of the duality gap, so certificates use a tighter solve.
constexpr double kCertificateTol = 1e-12;

SdpSolution certificate_solve(const Game& game, Config cfg) {
  cfg.tol = std::min(cfg.tol, kCertificateTol);
  return certified_solve(game, cfg, kCertificateTol);
}

// The dense spanning test is skipped for very large games; synthesis then
// falls back to the numerical rank of the vector span.
CliffordCertificate certificate_or_empty(const Game& game, const SdpSolution& sol) {
  try {
    return strongly_clifford_certificate(build_solution_algebra(game, sol.c));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge) throw;
    return {};
  }
}

std::string fmt(double x) { return format_double(x); }

struct Check {
  std::string check;
  std::string parameter;
  double measured = 0.0;
  double bound = 0.0;
  bool holds = true;
};

std::vector<Check> approx_checks(const Game& game, const Config& cfg, std::ostream& err) {
  const SdpSolution sol = certificate_solve(game, cfg);
  std::vector<Check> out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;

  for (const double angle : {1e-2, 1e-3}) {
    Mat v = sol.strategy.v();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      Vec dir(v.rows());
      for (Eigen::Index k = 0; k < dir.size(); ++k) dir(k) = normal(rng);
      dir -= dir.dot(v.col(j)) * v.col(j);
      if (dir.norm() == 0.0) continue;
      v.col(j) = std::cos(angle) * v.col(j) + std::sin(angle) * dir.normalized();
    }
    try {
      const MbiasReport rep = check_mbias_bound(game, VectorStrategy(sol.strategy.u(), v), sol.c);
      out.push_back({"marginal_bias", "angle=" + fmt(angle), rep.residuals.maxCoeff(), rep.bound, rep.all_hold});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EpsilonOutOfRange) throw;
      err << "note: marginal_bias at angle " << fmt(angle) << " skipped: " << e.what() << '\n';
    }
  }

  const CliffordCertificate cert = certificate_or_empty(game, sol);
  std::optional<QuantumStrategy> synth;
  try {
    synth = synthesize_optimal(game, sol, cert);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroRowBias && e.code() != ErrorCode::TooLarge) throw;
    err << "note: synthesis skipped: " << e.what() << '\n';
  }
  if (synth) {
    const Marginal marg = marginal_of(*synth);
    const SolutionAlgebra alg = build_solution_algebra(game, sol.c);
    const double rel = defect(alg, marg.b).max_defect;
    out.push_back({"marginal_relations", "synthesized", rel, 1e-8, rel <= 1e-8});
    const double eps = std::max(0.0, sol.c.sum() - evaluate_bias(game, *synth));
    try {
      const ExtractResult ex = extract_approx_rep(game, {sol.c, sol.d}, marg, eps);
      out.push_back({"extract_approx_rep", "eps=" + fmt(eps), ex.report.max_defect, ex.bound, ex.holds});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EpsilonTooLarge) throw;
      err << "note: extraction skipped: " << e.what() << '\n';
    }
  }

  if (cert.strongly_clifford && cert.rank >= 1 && cert.rank <= 8) {
    const auto exact = clifford_generators(cert.rank, 1);
    for (const double eta : cfg.noise_grid) {
      std::vector<CMat> noisy;
      for (const auto& g : exact) {
        const Eigen::Index d = g.rows();
        CMat h(d, d);
        for (Eigen::Index k = 0; k < h.size(); ++k) h.data()[k] = cplx(normal(rng), normal(rng));
        h = (h + h.adjoint()).eval();
        h *= eta / operator_norm(h);
        noisy.push_back(g + h);
      }
      RoundOptions ro;
      ro.enforce_radius = false;
      const RoundResult rr = round_to_exact(noisy, cert.rank, ro);
      out.push_back({"round_to_exact", "noise=" + fmt(eta), rr.dist, rr.bound, rr.holds});
    }
  }
  return out;
}

Json checks_to_json(const std::vector<Check>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json j;
    j["check"] = c.check;
    j["parameter"] = c.parameter;
    j["measured"] = c.measured;
    j["bound"] = c.bound;
    j["holds"] = c.holds;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string checks_to_csv(const std::vector<Check>& checks) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : checks)
    rows.push_back({c.check, c.parameter, fmt(c.measured), fmt(c.bound), c.holds ? "true" : "false"});
  return to_csv({"check", "parameter", "measured", "bound", "holds"}, rows);
}

bool all_hold(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.holds; });
}

std::vector<SweepRow> run_sweep(const Game& game, const Config& cfg) {
  const SdpSolution sol = certificate_solve(game, cfg);
  const CliffordCertificate cert = strongly_clifford_certificate(build_solution_algebra(game, sol.c));
  SeesawOptions so;
  so.seeds = cfg.seeds;
  so.iters = cfg.iters;
  so.seed = cfg.seed;
  return dimension_sweep(game, cert, sol.primal_value, cfg.eps_grid, so);
}

Json sweep_to_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j;
    j["eps"] = r.eps;
    j["measured_min_dim"] = r.measured_min_dim ? Json(*r.measured_min_dim) : Json(nullptr);
    j["bound_dim"] = r.bound_dim;
    j["seesaw_value_at_min_dim"] = r.seesaw_value;
    j["certified_eps_q"] = r.certified_eps_q;
    j["seeds"] = r.seeds;
    j["iters"] = r.iters;
    j["holds"] = r.holds;
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({fmt(r.eps), r.measured_min_dim ? std::to_string(*r.measured_min_dim) : "", fmt(r.bound_dim),
                     fmt(r.seesaw_value), fmt(r.certified_eps_q), std::to_string(r.seeds), std::to_string(r.iters)});
  return to_csv({"eps", "measured_min_dim", "bound_dim", "seesaw_value_at_min_dim", "certified_eps_q", "seeds", "iters"},
                cells);
}

bool sweep_holds(const std::vector<SweepRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.holds; });
}

Json synth_json(const Game& game, const SdpSolution& sol, const CliffordCertificate& cert) {
  const QuantumStrategy s = synthesize_optimal(game, sol, cert);
  Json j = strategy_to_json(s);
  j["bias"] = evaluate_bias(game, s);
  j["entropy"] = entanglement_entropy(s.psi(), s.d1(), s.d2());
  return j;
}

int cmd_report(const Game& game, const Config& cfg, std::ostream& err) {
  const SdpSolution sol = certificate_solve(game, cfg);
  const CliffordCertificate cert = certificate_or_empty(game, sol);
  Json j;
  j["game"] = game_to_json(game);
  try {
    j["classical_bias"] = classical_bias(game);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge) throw;
    j["classical_bias"] = nullptr;
  }
  j["tsirelson_r"] = tsirelson_r(static_cast<long>(game.m()), static_cast<long>(game.n()));
  j["solution"] = solution_to_json(sol);
  j["certificate"] = certificate_to_json(cert);
  try {
    j["strategy"] = synth_json(game, sol, cert);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroRowBias && e.code() != ErrorCode::TooLarge) throw;
    j["strategy"] = nullptr;
    err << "note: synthesis skipped: " << e.what() << '\n';
  }
  const auto checks = approx_checks(game, cfg, err);
  j["verify_approx"] = checks_to_json(checks);
  bool ok = all_hold(checks);
  if (cert.strongly_clifford && cert.rank / 2 <= 4) {
    const auto rows = run_sweep(game, cfg);
    j["sweep"] = sweep_to_json(rows);
    ok = ok && sweep_holds(rows);
  } else {
    j["sweep"] = nullptr;
  }
  write_output(cfg.output, dump_json(j));
  return ok ? kOk : kBoundViolation;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::NotConverged ? kNotConverged : kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& err) {
  Config cfg;
  CLI::App app{"XOR game values, solution algebras, optimal strategies and approximate-representation checks"};
  app.require_subcommand(1);

  const auto add_io = [&cfg](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("-i,--input", cfg.input, "Game JSON file")->required();
    sub->add_option("-o,--output", cfg.output, "Output file (default: standard output)");
  };
  const auto add_solver = [&cfg](CLI::App* sub) {
    sub->add_option("--tol", cfg.tol, "Duality gap tolerance")->default_val(1e-8)->check(CLI::PositiveNumber);
    sub->add_option("--restarts", cfg.restarts, "Random restarts")->default_val(8)->check(CLI::Range(1, 1 << 16));
    sub->add_option("--seed", cfg.seed, "Random seed")->default_val(0);
    sub->add_option("--rank", cfg.rank, "Vector dimension (0 = automatic)")->default_val(0)->check(CLI::NonNegativeNumber);
  };
  const auto add_seesaw = [&cfg](CLI::App* sub) {
    sub->add_option("--seeds", cfg.seeds, "See-saw starting points per dimension")->default_val(8)->check(CLI::Range(1, 1 << 16));
    sub->add_option("--iters", cfg.iters, "See-saw rounds per start")->default_val(500)->check(CLI::Range(1, 1 << 24));
  };
  const auto add_format = [&cfg](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->default_val("csv")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* gen = app.add_subcommand("gen", "Write a game as JSON");
  gen->require_subcommand(1);
  auto* gen_chsh = gen->add_subcommand("chsh", "Graph game of the complete graph K_n");
  auto* gen_tight = gen->add_subcommand("tight", "Game whose optimum needs floor((n-1)/2) ebits");
  auto* gen_cl = gen->add_subcommand("cl", "Graph game of the Clifford anticommutation graph CL(n)");
  auto* gen_graph = gen->add_subcommand("graph", "Graph game of an edge list");
  for (auto* sub : {gen_chsh, gen_tight, gen_cl}) {
    sub->add_option("--n", cfg.n, "Size parameter")->required();
    add_io(sub, false);
  }
  gen_graph->add_option("--graph", cfg.graph, "Edge list, one \"i j\" pair per line, 1-based")->required();
  gen_graph->add_option("--vertices", cfg.vertices, "Vertex count (default: largest endpoint)");
  add_io(gen_graph, false);

  auto* solve = app.add_subcommand("solve", "Certified quantum bias and marginal biases");
  auto* algebra = app.add_subcommand("algebra", "Strong-Clifford certificate and minimum entanglement");
  auto* synth = app.add_subcommand("synth", "Explicit optimal strategy with its entanglement entropy");
  auto* verify = app.add_subcommand("verify-approx", "Check the approximate-strategy bounds; exit 4 on a violation");
  auto* sweep = app.add_subcommand("sweep", "See-saw minimal dimension against the dimension lower bound");
  auto* report = app.add_subcommand("report", "All of the above for one game in one JSON document");
  for (auto* sub : {solve, algebra, synth, verify, sweep, report}) {
    add_io(sub, true);
    add_solver(sub);
  }
  verify->add_option("--noise", cfg.noise_grid, "Noise levels for the rounding check")->delimiter(',');
  add_format(verify);
  sweep->add_option("--eps-grid", cfg.eps_grid, "Comma-separated eps values")->delimiter(',');
  add_seesaw(sweep);
  add_format(sweep);
  report->add_option("--eps-grid", cfg.eps_grid, "Comma-separated eps values for the sweep")->delimiter(',');
  add_seesaw(report);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, diag;
    const int code = app.exit(e, out, diag);
    if (code == 0) {
      write_output("", out.str());
      return kOk;
    }
    err << diag.str() << out.str();
    return kValidation;
  }

  return guarded(err, [&]() -> int {
    if (gen->parsed()) {
      std::optional<Game> game;
      if (gen_chsh->parsed()) game = chsh_game(cfg.n);
      if (gen_tight->parsed()) game = tight_game(cfg.n);
      if (gen_cl->parsed()) game = cl_game(cfg.n);
      if (gen_graph->parsed())
        game = graph_game(read_graph(cfg.graph, cfg.vertices > 0 ? std::optional<int>(cfg.vertices) : std::nullopt));
      write_output(cfg.output, dump_json(game_to_json(*game)));
      return kOk;
    }
    const Game game = read_game(cfg.input);
    if (solve->parsed()) {
      const SdpSolution sol = solve_quantum_bias(game, solver_options(cfg));
      write_output(cfg.output, dump_json(solution_to_json(sol)));
      if (!sol.certified) {
        err << "error: solver did not certify (gap " << fmt(sol.gap) << ")\n";
        return kNotConverged;
      }
      return kOk;
    }
    if (algebra->parsed()) {
      const SdpSolution sol = certificate_solve(game, cfg);
      const auto cert = strongly_clifford_certificate(build_solution_algebra(game, sol.c));
      write_output(cfg.output, dump_json(certificate_to_json(cert)));
      return kOk;
    }
    if (synth->parsed()) {
      const SdpSolution sol = certificate_solve(game, cfg);
      write_output(cfg.output, dump_json(synth_json(game, sol, certificate_or_empty(game, sol))));
      return kOk;
    }
    if (verify->parsed()) {
      const auto checks = approx_checks(game, cfg, err);
      write_output(cfg.output, cfg.format == "json" ? dump_json(checks_to_json(checks)) : checks_to_csv(checks));
      return all_hold(checks) ? kOk : kBoundViolation;
    }
    if (sweep->parsed()) {
      const auto rows = run_sweep(game, cfg);
      write_output(cfg.output, cfg.format == "json" ? dump_json(sweep_to_json(rows)) : sweep_to_csv(rows));
      return sweep_holds(rows) ? kOk : kBoundViolation;
    }
    return cmd_report(game, cfg, err);
  });
}

}  // namespace xorgame::cli
