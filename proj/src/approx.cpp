#include "xorgame/approx.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kNormSlack = 1e-9;
constexpr double kMixedTol = 1e-12;
constexpr double kBoundSlack = 1e-12;
constexpr int kMaxRoundRank = 12;
constexpr int kRoundStarts = 8;
constexpr int kRoundRefinements = 3;
constexpr std::uint64_t kRoundSeed = 0x5eed;

void require_hermitian(const std::vector<CMat>& b) {
  for (std::size_t k = 0; k < b.size(); ++k)
    if (b[k].rows() != b[k].cols() || !is_hermitian(b[k], kHermitianTol))
      throw Error(ErrorCode::NonHermitianObservable, "B_" + std::to_string(k + 1) + " is not Hermitian");
}

Eigen::Index common_dim(const std::vector<CMat>& b) {
  if (b.empty()) return 0;
  const Eigen::Index dim = b.front().rows();
  for (const auto& op : b)
    if (op.rows() != dim || op.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "operators must share one square dimension");
  return dim;
}

bool norms_ok(const std::vector<CMat>& b) {
  return std::all_of(b.begin(), b.end(), [](const CMat& op) { return operator_norm(op) <= 1.0 + kNormSlack; });
}

CMat block_diag(const CMat& a, const CMat& b) {
  CMat out = CMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CMat pad_identity(const CMat& op, Eigen::Index d) {
  return block_diag(op, CMat::Identity(d - op.rows(), d - op.rows()));
}

// Products op_1^{a_1} ... op_r^{a_r} for every bit mask a.
std::vector<CMat> group_images(const std::vector<CMat>& ops) {
  const Eigen::Index dim = ops.front().rows();
  std::vector<CMat> out(std::size_t{1} << ops.size());
  out[0] = CMat::Identity(dim, dim);
  for (std::size_t mask = 1; mask < out.size(); ++mask) {
    const int top = 63 - __builtin_clzll(mask);
    out[mask] = out[mask & ~(std::size_t{1} << top)] * ops[static_cast<std::size_t>(top)];
  }
  return out;
}

CMat random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMat x(d, d);
  for (Eigen::Index k = 0; k < x.size(); ++k) x.data()[k] = cplx(normal(rng), normal(rng));
  return x + x.adjoint();
}

double top_eigenpair(const CMat& h, CVec& vec) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  vec = es.eigenvectors().col(h.rows() - 1);
  return es.eigenvalues()(h.rows() - 1);
}

struct SeesawState {
  std::vector<CMat> a;
  std::vector<CMat> b;
  CVec psi;
};

double run_seesaw(const Game& game, Eigen::Index d, SeesawState& st, int iters, double tol) {
  const Mat& g = game.cost();
  const Eigen::Index m = game.m(), n = game.n();
  double value = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < iters; ++it) {
    CMat lambda = psi_to_lambda(st.psi, d, d);
    for (Eigen::Index i = 0; i < m; ++i) {
      CMat sum = CMat::Zero(d, d);
      for (Eigen::Index j = 0; j < n; ++j)
        if (g(i, j) != 0.0) sum += g(i, j) * st.b[static_cast<std::size_t>(j)];
      st.a[static_cast<std::size_t>(i)] = hermitian_sign(CMat((lambda.adjoint() * sum * lambda).transpose()));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      CMat sum = CMat::Zero(d, d);
      for (Eigen::Index i = 0; i < m; ++i)
        if (g(i, j) != 0.0) sum += g(i, j) * st.a[static_cast<std::size_t>(i)].transpose();
      st.b[static_cast<std::size_t>(j)] = hermitian_sign(CMat(lambda * sum * lambda.adjoint()));
    }
    CMat h = CMat::Zero(d * d, d * d);
    for (Eigen::Index i = 0; i < m; ++i) {
      CMat sum = CMat::Zero(d, d);
      for (Eigen::Index j = 0; j < n; ++j)
        if (g(i, j) != 0.0) sum += g(i, j) * st.b[static_cast<std::size_t>(j)];
      h += kron(st.a[static_cast<std::size_t>(i)], sum);
    }
    h = (h + h.adjoint()).eval() * 0.5;
    const double next = top_eigenpair(h, st.psi);
    const double improvement = next - value;
    value = next;
    if (improvement < tol) break;
  }
  return value;
}

}  // namespace

DefectReport defect(const SolutionAlgebra& alg, const std::vector<CMat>& b) {
  common_dim(b);
  require_hermitian(b);
  const Vec d = relation_defects(alg, b);
  DefectReport out;
  for (std::size_t r = 0; r < alg.relations().size(); ++r) {
    const double v = d(static_cast<Eigen::Index>(r));
    out.per_relation.emplace_back(alg.relations()[r].id(), v);
    out.max_defect = std::max(out.max_defect, v);
  }
  out.norm_ok = norms_ok(b);
  return out;
}

DefectReport clifford_defect(const std::vector<CMat>& b) {
  const Eigen::Index dim = common_dim(b);
  require_hermitian(b);
  DefectReport out;
  const CMat id = CMat::Identity(dim, dim);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double v = operator_norm(CMat(b[i] * b[i] - id));
    out.per_relation.emplace_back("square " + std::to_string(i + 1), v);
    out.max_defect = std::max(out.max_defect, v);
  }
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double v = operator_norm(CMat(b[i] * b[j] + b[j] * b[i]));
      out.per_relation.emplace_back("anticommute " + std::to_string(i + 1) + " " + std::to_string(j + 1), v);
      out.max_defect = std::max(out.max_defect, v);
    }
  out.norm_ok = norms_ok(b);
  return out;
}

GapSplitResult eigengap_split(const CMat& rho, const std::vector<CMat>& s) {
  const Eigen::Index d = rho.rows();
  if (d == 0 || rho.cols() != d) throw Error(ErrorCode::DimensionMismatch, "rho must be square");
  if (!is_hermitian(rho, kHermitianTol)) throw Error(ErrorCode::InvalidArgument, "rho must be Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(rho);
  const Vec& ev = es.eigenvalues();  // ascending
  GapSplitResult out;
  GapSplit& sp = out.split;
  sp.tau = (ev.array() - 1.0 / static_cast<double>(d)).abs().maxCoeff();
  if (d < 2 || sp.tau <= kMixedTol) throw Error(ErrorCode::MaximallyMixed, "rho is maximally mixed; no split exists");

  // k counts eigenvalues above the cut, scanning in descending order.
  Eigen::Index k_best = 1;
  sp.gap = -1.0;
  for (Eigen::Index k = 1; k < d; ++k) {
    const double g = ev(d - k) - ev(d - k - 1);
    if (g > sp.gap) {
      sp.gap = g;
      k_best = k;
    }
  }
  sp.w1 = es.eigenvectors().rightCols(k_best);
  sp.w2 = es.eigenvectors().leftCols(d - k_best);
  sp.p1 = sp.w1 * sp.w1.adjoint();
  sp.p2 = sp.w2 * sp.w2.adjoint();

  for (const auto& op : s) {
    if (op.rows() != d || op.cols() != d) throw Error(ErrorCode::DimensionMismatch, "S must match rho");
    const double comm = (rho * op - op * rho).norm();
    const double res = (sp.p1 * op * sp.p1 + sp.p2 * op * sp.p2 - op).norm();
    const double bound = comm * static_cast<double>(d) / sp.tau;
    out.commutators.push_back(comm);
    out.residuals.push_back(res);
    out.bounds.push_back(bound);
    if (res > bound * (1.0 + 1e-9) + kBoundSlack) out.all_hold = false;
  }
  return out;
}

ExtractResult extract_approx_rep(const Game& game, const MarginalBiases& biases, const Marginal& marg, double eps,
                                 const ExtractOptions& opts) {
  if (!(eps >= 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be non-negative");
  if (biases.c.size() != game.m() || biases.d.size() != game.n())
    throw Error(ErrorCode::LengthMismatch, "marginal biases do not match the game size");
  const double mn = static_cast<double>(game.m() + game.n());
  const double limit = std::pow(biases.d.minCoeff(), 16) / (100.0 * mn);
  if (eps >= limit)
    throw Error(ErrorCode::EpsilonTooLarge,
                "eps must be below min_j d_j^16 / (100(m+n)) = " + std::to_string(limit));
  const Eigen::Index d = marg.rho.rows();
  if (d == 0 || marg.rho.cols() != d || static_cast<Eigen::Index>(marg.b.size()) != game.n())
    throw Error(ErrorCode::DimensionMismatch, "marginal does not match the game");

  ExtractResult out;
  const double c0 = opts.c0_scale * std::sqrt(10.0) * std::pow(mn, 0.25);
  const double dd = static_cast<double>(d);
  out.tau = operator_norm(CMat(marg.rho - CMat::Identity(d, d) / dd));
  out.tau0 = 1.5 * std::sqrt(c0) * std::sqrt(dd) * std::pow(eps, 0.125);
  out.bound = 15.0 * std::pow(mn, 0.125) * std::pow(dd, 1.5) * std::pow(eps, 0.125);
  if (out.tau <= out.tau0 + kBoundSlack) {
    out.identity = true;
    out.basis = CMat::Identity(d, d);
  } else {
    const GapSplitResult split = eigengap_split(marg.rho, marg.b);
    out.identity = false;
    out.basis = split.split.w1;
  }
  out.p = out.basis * out.basis.adjoint();

  std::vector<CMat> compressed;
  for (const auto& op : marg.b) {
    CMat c = out.basis.adjoint() * op * out.basis;
    compressed.push_back((c + c.adjoint()) * 0.5);
  }
  out.report = defect(build_solution_algebra(game, biases.c), compressed);
  out.holds = out.report.max_defect <= out.bound + kBoundSlack;
  return out;
}

ExtractResult extract_approx_rep(const Game& game, const Marginal& marg, double eps, const ExtractOptions& opts) {
  return extract_approx_rep(game, marginal_biases(game), marg, eps, opts);
}

RoundResult round_to_exact(const std::vector<CMat>& b, int r, const RoundOptions& opts) {
  if (r < 1 || static_cast<int>(b.size()) != r)
    throw Error(ErrorCode::InvalidArgument, "need exactly r >= 1 operators");
  if (r > kMaxRoundRank) throw Error(ErrorCode::TooLarge, "rounding supports r <= 12");
  const Eigen::Index d = common_dim(b);
  require_hermitian(b);
  const Eigen::Index irrep = Eigen::Index{1} << (r / 2);
  if (d % irrep != 0)
    throw Error(ErrorCode::NoExactRep, "dimension " + std::to_string(d) + " is not a multiple of " +
                                           std::to_string(irrep));

  RoundResult out;
  out.eps = clifford_defect(b).max_defect;
  const double r2 = static_cast<double>(r) * r;
  out.bound = 2.5 * r2 * out.eps;
  out.radius = 1.0 / (250.0 * r2);
  out.within_radius = out.eps < out.radius;
  if (opts.enforce_radius && !out.within_radius)
    throw Error(ErrorCode::DefectTooLarge, "defect " + std::to_string(out.eps) + " is outside the stability radius");

  std::vector<CMat> rounded;
  for (const auto& op : b) rounded.push_back(hermitian_sign(op));
  const auto psi = group_images(rounded);

  const auto plus = clifford_generators(r, 1);
  auto minus = plus;
  minus.back() = -minus.back();
  const Eigen::Index mult = d / irrep;
  // Odd r has two irreducible representations with J = -I, told apart by the
  // sign of the central product; even r has one.
  const Eigen::Index max_split = r % 2 == 1 ? mult : 0;

  out.dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k <= max_split; ++k) {
    const Eigen::Index first = r % 2 == 1 ? k : mult;
    std::vector<CMat> pi;
    for (int i = 0; i < r; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      CMat op(0, 0);
      if (first > 0) op = kron(CMat::Identity(first, first), plus[idx]);
      if (mult - first > 0) op = block_diag(op, kron(CMat::Identity(mult - first, mult - first), minus[idx]));
      pi.push_back(std::move(op));
    }
    const auto pimg = group_images(pi);
    // phi(V) = avg_g psi(g) V pi(g)^* lands near the intertwiners U (w (x) I).
    // A poor starting V leaves w close to singular, so start from the best
    // conditioned of a few unitaries and then iterate V <- polar(phi(V)).
    const auto phi = [&](const CMat& v) {
      CMat t = CMat::Zero(d, d);
      for (std::size_t g = 0; g < psi.size(); ++g) t += psi[g] * v * pimg[g].adjoint();
      return CMat(t / static_cast<double>(psi.size()));
    };
    const auto polar = [](const CMat& t, double* smin) {
      Eigen::JacobiSVD<CMat> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (smin != nullptr) *smin = svd.singularValues().minCoeff();
      return CMat(svd.matrixU() * svd.matrixV().adjoint());
    };
    std::mt19937_64 rng(kRoundSeed);
    CMat u;
    double best_smin = -1.0;
    for (int trial = 0; trial <= kRoundStarts; ++trial) {
      const CMat start = trial == 0 ? CMat(CMat::Identity(d, d))
                                    : polar(random_hermitian(d, rng) + CMat::Identity(d, d) * cplx(0, 1), nullptr);
      double smin = 0.0;
      CMat cand_u = polar(phi(start), &smin);
      if (smin > best_smin) {
        best_smin = smin;
        u = std::move(cand_u);
      }
    }
    for (int it = 0; it < kRoundRefinements; ++it) u = polar(phi(u), nullptr);

    std::vector<CMat> cand;
    double dist = 0.0;
    for (int i = 0; i < r; ++i) {
      CMat op = u * pi[static_cast<std::size_t>(i)] * u.adjoint();
      op = (op + op.adjoint()).eval() * 0.5;
      dist = std::max(dist, operator_norm(CMat(b[static_cast<std::size_t>(i)] - op)));
      cand.push_back(std::move(op));
    }
    if (dist < out.dist) {
      out.dist = dist;
      out.b = std::move(cand);
      out.multiplicity_split = static_cast<int>(first);
    }
  }
  out.result_defect = clifford_defect(out.b).max_defect;
  out.holds = out.dist <= out.bound + kBoundSlack;
  return out;
}

QuantumStrategy embed_strategy(const QuantumStrategy& s, Eigen::Index d) {
  if (d < s.d1() || d < s.d2()) throw Error(ErrorCode::DimensionMismatch, "cannot embed into a smaller dimension");
  std::vector<CMat> a, b;
  for (const auto& op : s.a()) a.push_back(pad_identity(op, d));
  for (const auto& op : s.b()) b.push_back(pad_identity(op, d));
  CMat lambda = CMat::Zero(d, d);
  lambda.topLeftCorner(s.d2(), s.d1()) = psi_to_lambda(s.psi(), s.d1(), s.d2());
  return QuantumStrategy(std::move(a), std::move(b), lambda_to_psi(lambda));
}

SeesawResult seesaw(const Game& game, Eigen::Index d, const SeesawOptions& opts, const QuantumStrategy* warm) {
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (opts.seeds < 0 || opts.iters < 1) throw Error(ErrorCode::InvalidArgument, "need seeds >= 0 and iters >= 1");
  const auto starts = static_cast<std::size_t>(opts.seeds) + (warm != nullptr ? 1 : 0);
  if (starts == 0) throw Error(ErrorCode::InvalidArgument, "need at least one starting point");
  std::vector<SeesawState> states(starts);
  std::vector<double> values(starts, -std::numeric_limits<double>::infinity());

  parallel_for(starts, [&](std::size_t idx) {
    SeesawState& st = states[idx];
    st.a.assign(static_cast<std::size_t>(game.m()), CMat::Identity(d, d));
    if (idx < static_cast<std::size_t>(opts.seeds)) {
      std::seed_seq seq{static_cast<std::uint32_t>(opts.seed & 0xffffffffu),
                        static_cast<std::uint32_t>(opts.seed >> 32), static_cast<std::uint32_t>(idx),
                        static_cast<std::uint32_t>(d)};
      std::mt19937_64 rng(seq);
      for (Eigen::Index j = 0; j < game.n(); ++j) st.b.push_back(hermitian_sign(random_hermitian(d, rng)));
      std::normal_distribution<double> normal;
      st.psi.resize(d * d);
      for (Eigen::Index k = 0; k < st.psi.size(); ++k) st.psi(k) = cplx(normal(rng), normal(rng));
      st.psi.normalize();
    } else {
      const QuantumStrategy padded = embed_strategy(*warm, d);
      st.a = padded.a();
      st.b = padded.b();
      st.psi = padded.psi();
    }
    run_seesaw(game, d, st, opts.iters, opts.tol);
    values[idx] = evaluate_bias(game, QuantumStrategy(st.a, st.b, st.psi));
  });

  SeesawResult out;
  out.value = -std::numeric_limits<double>::infinity();
  for (std::size_t idx = 0; idx < starts; ++idx)
    if (values[idx] > out.value) {
      out.value = values[idx];
      out.best_seed = static_cast<int>(idx);
    }
  const auto& best = states[static_cast<std::size_t>(out.best_seed)];
  out.strategy.emplace(best.a, best.b, best.psi);
  return out;
}

double seesaw_bias(const Game& game, Eigen::Index d, int seeds, int iters, std::uint64_t seed) {
  SeesawOptions opts;
  opts.seeds = seeds;
  opts.iters = iters;
  opts.seed = seed;
  return seesaw(game, d, opts).value;
}

std::vector<double> seesaw_nested(const Game& game, Eigen::Index max_dim, const SeesawOptions& opts) {
  std::vector<double> out;
  std::optional<QuantumStrategy> prev;
  for (Eigen::Index d = 1; d <= max_dim; ++d) {
    SeesawResult res = seesaw(game, d, opts, prev ? &*prev : nullptr);
    out.push_back(res.value);
    prev = std::move(res.strategy);
  }
  return out;
}

double dimension_lower_bound(long m, long n, int r, double eps) {
  const double c1 = 15.0 * std::pow(static_cast<double>(m + n), 0.125);
  const double delta = 1.0 / (250.0 * static_cast<double>(r) * r);
  const double c2 = std::pow(c1 / delta, -2.0 / 3.0);
  return std::min(c2 * std::pow(eps, -1.0 / 12.0), std::ldexp(1.0, r / 2));
}

std::vector<SweepRow> dimension_sweep(const Game& game, const CliffordCertificate& cert, double eps_q,
                                      const std::vector<double>& eps_grid, const SeesawOptions& opts) {
  if (!cert.strongly_clifford) throw Error(ErrorCode::NotClifford, "dimension sweep needs a strongly Clifford game");
  for (const double e : eps_grid)
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps grid entries must be positive");
  const Eigen::Index max_dim = Eigen::Index{1} << (cert.rank / 2);
  const auto values = seesaw_nested(game, max_dim, opts);
  std::vector<SweepRow> rows;
  for (const double e : eps_grid) {
    SweepRow row;
    row.eps = e;
    row.bound_dim = dimension_lower_bound(static_cast<long>(game.m()), static_cast<long>(game.n()), cert.rank, e);
    row.certified_eps_q = eps_q;
    row.seeds = opts.seeds;
    row.iters = opts.iters;
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k] >= eps_q - e) {
        row.measured_min_dim = static_cast<long>(k + 1);
        row.seesaw_value = values[k];
        break;
      }
    if (!row.measured_min_dim) row.seesaw_value = values.back();
    row.holds = !row.measured_min_dim || static_cast<double>(*row.measured_min_dim) >= row.bound_dim;
    rows.push_back(row);
  }
  return rows;
}

VectRankReport vect_rank_bound_check(int n, double eps, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need n >= 2");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const Game game = chsh_game(n);
  const SdpSolution sol = solve_quantum_bias(game);
  if (!sol.certified) throw Error(ErrorCode::NotConverged, "solve did not certify");
  const CliffordCertificate cert = strongly_clifford_certificate(build_solution_algebra(game, sol.c));
  const Mat v_opt = cert.strongly_clifford ? cert.v : sol.strategy.bob_gram();
  const double eps_q = gamma_value(game, v_opt);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat gauss(n, n);
  for (Eigen::Index k = 0; k < gauss.size(); ++k) gauss.data()[k] = normal(rng);
  const Mat q = Eigen::HouseholderQR<Mat>(gauss).householderQ();

  const double slope = 8.0 * std::sqrt(2.0) * n * (n - 1);
  VectRankReport out;
  out.n = n;
  out.eps = eps;
  out.floor_at_eps = n - slope * eps;
  for (int z = 0; z < n; ++z) {
    const Mat basis = q.leftCols(n - z);
    const Mat proj = basis * basis.transpose();
    Mat vt = proj * v_opt * proj;
    const Vec scale = vt.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    vt = scale.asDiagonal() * vt * scale.asDiagonal();
    vt = (vt + vt.transpose()).eval() * 0.5;
    vt.diagonal().setOnes();
    VectRankRow row;
    row.z = z;
    Eigen::SelfAdjointEigenSolver<Mat> es(vt, Eigen::EigenvaluesOnly);
    row.rank = static_cast<int>((es.eigenvalues().array() > 1e-9).count());
    row.deficit = std::max(0.0, eps_q - gamma_value(game, vt));
    row.floor = n - slope * row.deficit;
    row.holds = row.rank >= row.floor - 1e-9;
    out.all_hold = out.all_hold && row.holds;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace xorgame
