#include "xorgame/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kDiagTol = 1e-9;
constexpr double kPsdTol = 1e-9;
constexpr double kResidualSlack = 1e-9;
constexpr Eigen::Index kDenseSlackLimit = 1500;

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;

SparseRM to_sparse(const Mat& g) { return g.sparseView(); }

void normalize_columns(Mat& a) {
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double nrm = a.col(k).norm();
    if (nrm > 0.0) a.col(k) /= nrm;
  }
}

// Replaces column k of `target` by the normalized column of `source` when it
// is non-zero; zero columns leave the old unit vector in place.
void normalize_into(const Mat& source, Mat& target, Vec& norms) {
  norms.resize(source.cols());
  for (Eigen::Index k = 0; k < source.cols(); ++k) {
    norms(k) = source.col(k).norm();
    if (norms(k) > 0.0) target.col(k) = source.col(k) / norms(k);
  }
}

struct RestartResult {
  Mat u;
  Mat v;
  DualCertificate cert;
  bool certified = false;
  long sweeps = 0;
};

RestartResult run_restart(const Game& game, const SparseRM& gs, int rank, std::uint64_t seed, int index,
                          const SolverOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  Mat u(rank, game.m()), v(rank, game.n());
  for (Eigen::Index k = 0; k < u.size(); ++k) u.data()[k] = normal(rng);
  for (Eigen::Index k = 0; k < v.size(); ++k) v.data()[k] = normal(rng);
  normalize_columns(u);
  normalize_columns(v);

  const SparseRM gst = gs.transpose();
  // Buffers are reused across sweeps; large games would otherwise spend most
  // of their time in the allocator.
  Mat p(rank, game.m()), q(rank, game.n()), v_prev(rank, game.n());
  Vec c, d;
  double prev = -std::numeric_limits<double>::infinity();
  long next_check = 1;
  RestartResult out;
  for (long sweep = 1; sweep <= opts.max_iters; ++sweep) {
    p.noalias() = v * gst;  // column i is sum_j G_ij v_j
    normalize_into(p, u, c);
    q.noalias() = u * gs;  // column j is sum_i G_ij u_i
    v_prev = v;
    normalize_into(q, v, d);
    const double step = (v - v_prev).colwise().norm().maxCoeff();
    const double gap_estimate = 0.5 * (d.sum() - c.sum());
    const double obj = d.sum();
    const double improvement = obj - prev;
    prev = obj;
    out.sweeps = sweep;
    if (gap_estimate < opts.tol && improvement < opts.tol * 1e-2 && step < opts.step_tol && sweep >= next_check) {
      // Finish on a u-update so the row fixed-point equations hold exactly.
      p.noalias() = v * gst;
      normalize_into(p, u, c);
      out.cert = dual_certificate(game, VectorStrategy(u, v));
      if (out.cert.gap <= opts.tol && out.cert.slack_min_eig >= -opts.psd_tol) {
        out.certified = true;
        break;
      }
      next_check = sweep + std::max<long>(16, sweep / 4);
    }
  }
  if (!out.certified) {
    p.noalias() = v * gst;
    normalize_into(p, u, c);
    out.cert = dual_certificate(game, VectorStrategy(u, v));
    out.certified = out.cert.gap <= opts.tol && out.cert.slack_min_eig >= -opts.psd_tol;
  }
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

}  // namespace

VectorStrategy::VectorStrategy(Mat u, Mat v) : u_(std::move(u)), v_(std::move(v)) {
  if (u_.rows() != v_.rows())
    throw Error(ErrorCode::DimensionMismatch, "u and v live in different dimensions");
  for (Eigen::Index i = 0; i < u_.cols(); ++i)
    if (std::abs(u_.col(i).norm() - 1.0) > kUnitTol)
      throw Error(ErrorCode::InvalidArgument, "u_" + std::to_string(i + 1) + " is not a unit vector");
  for (Eigen::Index j = 0; j < v_.cols(); ++j)
    if (std::abs(v_.col(j).norm() - 1.0) > kUnitTol)
      throw Error(ErrorCode::InvalidArgument, "v_" + std::to_string(j + 1) + " is not a unit vector");
}

double vector_bias(const Game& game, const VectorStrategy& s) {
  if (s.u().cols() != game.m() || s.v().cols() != game.n())
    throw Error(ErrorCode::DimensionMismatch, "strategy does not match game size");
  return (game.cost().array() * s.correlation().array()).sum();
}

double slack_min_eigenvalue_dense(const Mat& g, const Vec& c, const Vec& d) {
  const Eigen::Index m = g.rows(), n = g.cols();
  Mat s = Mat::Zero(m + n, m + n);
  s.diagonal().head(m) = 0.5 * c;
  s.diagonal().tail(n) = 0.5 * d;
  s.topRightCorner(m, n) = -0.5 * g;
  s.bottomLeftCorner(n, m) = -0.5 * g.transpose();
  return min_eigenvalue(s);
}

double slack_min_eigenvalue_schur(const Mat& g, const Vec& c, const Vec& d) {
  // Zero rows and columns of G decouple into diagonal entries of S.
  std::vector<Eigen::Index> rows, cols;
  double decoupled = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    if (g.row(i).cwiseAbs().maxCoeff() > 0.0) rows.push_back(i);
    else decoupled = std::min(decoupled, 0.5 * c(i));
  }
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    if (g.col(j).cwiseAbs().maxCoeff() > 0.0) cols.push_back(j);
    else decoupled = std::min(decoupled, 0.5 * d(j));
  }
  if (rows.empty()) return decoupled;

  const auto mr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Mat gr(mr, nc);
  Vec cr(mr), dr(nc);
  for (Eigen::Index a = 0; a < mr; ++a) {
    cr(a) = c(rows[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < nc; ++b) gr(a, b) = g(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
  }
  for (Eigen::Index b = 0; b < nc; ++b) dr(b) = d(cols[static_cast<std::size_t>(b)]);
  const SparseRM gs = to_sparse(gr);

  // The minimum eigenvalue is bounded above by the smallest diagonal entry and
  // below by Gershgorin; below the row diagonal, S - t I is positive definite
  // exactly when its Schur complement on the column block is.
  const double hi = 0.5 * std::min(cr.minCoeff(), dr.minCoeff());
  double lo = hi;
  const Vec row_abs = gr.cwiseAbs().rowwise().sum();
  const Vec col_abs = gr.cwiseAbs().colwise().sum().transpose();
  for (Eigen::Index a = 0; a < mr; ++a) lo = std::min(lo, 0.5 * (cr(a) - row_abs(a)));
  for (Eigen::Index b = 0; b < nc; ++b) lo = std::min(lo, 0.5 * (dr(b) - col_abs(b)));
  lo -= 1e-12 * (1.0 + std::abs(lo));

  const auto positive_definite = [&](double t) {
    Vec w(mr);
    for (Eigen::Index a = 0; a < mr; ++a) w(a) = 0.25 / (0.5 * cr(a) - t);
    const SparseRM wg = w.asDiagonal() * gs;
    Mat schur = -Mat(gs.transpose() * wg);
    schur.diagonal().array() += 0.5 * dr.array() - t;
    Eigen::LLT<Mat> llt(schur);
    return llt.info() == Eigen::Success;
  };

  double upper = hi;
  for (int it = 0; it < 200 && upper - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + upper);
    if (positive_definite(mid)) lo = mid;
    else upper = mid;
  }
  return std::min(lo, decoupled);
}

double slack_min_eigenvalue(const Mat& g, const Vec& c, const Vec& d) {
  if (g.rows() + g.cols() <= kDenseSlackLimit) return slack_min_eigenvalue_dense(g, c, d);
  return slack_min_eigenvalue_schur(g, c, d);
}

DualCertificate dual_certificate(const Game& game, const VectorStrategy& s) {
  if (s.u().cols() != game.m() || s.v().cols() != game.n())
    throw Error(ErrorCode::DimensionMismatch, "strategy does not match game size");
  const SparseRM gs = to_sparse(game.cost());
  const Mat p = s.v() * gs.transpose();
  const Mat q = s.u() * gs;
  DualCertificate cert;
  cert.c = p.colwise().norm().transpose();
  cert.d = q.colwise().norm().transpose();
  cert.primal_value = (s.u().array() * p.array()).sum();
  cert.dual_value = 0.5 * (cert.c.sum() + cert.d.sum());
  cert.gap = cert.dual_value - cert.primal_value;
  cert.slack_min_eig = slack_min_eigenvalue(game.cost(), cert.c, cert.d);
  return cert;
}

int default_rank(Eigen::Index m, Eigen::Index n) {
  long r = 1;
  while (r * (r + 1) / 2 < m + n + 1) ++r;
  return static_cast<int>(std::min<long>({static_cast<long>(m), static_cast<long>(n), r}));
}

SdpSolution solve_quantum_bias(const Game& game, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (!(opts.step_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "step_tol must be positive");
  if (opts.restarts < 1) throw Error(ErrorCode::InvalidArgument, "need at least one restart");
  const int rank = opts.rank > 0 ? opts.rank : default_rank(game.m(), game.n());
  const SparseRM gs = to_sparse(game.cost());

  std::vector<RestartResult> results(static_cast<std::size_t>(opts.restarts));
  parallel_for(results.size(), [&](std::size_t k) {
    results[k] = run_restart(game, gs, rank, opts.seed, static_cast<int>(k), opts);
  });

  // Certified restarts first, then smallest gap, then lowest index.
  std::size_t best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    const auto& a = results[k];
    const auto& b = results[best];
    if (a.certified != b.certified) {
      if (a.certified) best = k;
      continue;
    }
    if (a.cert.gap < b.cert.gap) best = k;
  }
  auto& r = results[best];
  return SdpSolution{VectorStrategy(std::move(r.u), std::move(r.v)),
                     r.cert.primal_value,
                     r.cert.c,
                     r.cert.d,
                     r.cert.dual_value,
                     r.cert.gap,
                     r.cert.slack_min_eig,
                     r.certified,
                     r.sweeps,
                     static_cast<int>(best)};
}

Vec gamma_row_bias_squares(const Game& game, const Mat& v) {
  if (v.rows() != game.n() || v.cols() != game.n())
    throw Error(ErrorCode::DimensionMismatch, "V must be n x n");
  const Mat& g = game.cost();
  return ((g * v).array() * g.array()).rowwise().sum().matrix();
}

double gamma_value(const Game& game, const Mat& v) {
  if (v.rows() != game.n() || v.cols() != game.n())
    throw Error(ErrorCode::DimensionMismatch, "V must be n x n");
  if ((v - v.transpose()).cwiseAbs().maxCoeff() > kDiagTol)
    throw Error(ErrorCode::InvalidArgument, "V is not symmetric");
  if ((v.diagonal().array() - 1.0).abs().maxCoeff() > kDiagTol)
    throw Error(ErrorCode::BadDiagonal, "V must have unit diagonal");
  if (min_eigenvalue(0.5 * (v + v.transpose())) < -kPsdTol)
    throw Error(ErrorCode::NotPSD, "V is not positive semidefinite");
  const Vec c2 = gamma_row_bias_squares(game, v);
  return c2.cwiseMax(0.0).cwiseSqrt().sum();
}

MarginalBiases marginal_biases(const Game& game, const SolverOptions& opts) {
  const SdpSolution sol = solve_quantum_bias(game, opts);
  if (!sol.certified)
    throw Error(ErrorCode::NotConverged, "no restart reached gap <= tol (best gap " + std::to_string(sol.gap) + ")");
  MarginalBiases out{sol.c, sol.d};
  // Zero rows and columns have zero marginal bias by definition.
  for (Eigen::Index i = 0; i < game.m(); ++i)
    if (game.cost().row(i).cwiseAbs().maxCoeff() == 0.0) out.c(i) = 0.0;
  for (Eigen::Index j = 0; j < game.n(); ++j)
    if (game.cost().col(j).cwiseAbs().maxCoeff() == 0.0) out.d(j) = 0.0;
  return out;
}

MbiasReport check_mbias_bound(const Game& game, const VectorStrategy& s, const Vec& c) {
  if (c.size() != game.m()) throw Error(ErrorCode::LengthMismatch, "need one marginal bias per row");
  const double mn = static_cast<double>(game.m() + game.n());
  double eps = c.sum() - vector_bias(game, s);
  if (eps < 0.0 && eps > -kUnitTol) eps = 0.0;
  if (eps < 0.0 || eps >= 1.0 / (4.0 * mn))
    throw Error(ErrorCode::EpsilonOutOfRange, "eps = " + std::to_string(eps) + " outside [0, 1/(4(m+n)))");
  MbiasReport report;
  report.epsilon = eps;
  report.bound = std::sqrt(10.0) * std::pow(mn, 0.25) * std::pow(eps, 0.25);
  const Mat p = s.v() * game.cost().transpose();
  report.residuals.resize(game.m());
  report.holds.resize(static_cast<std::size_t>(game.m()));
  for (Eigen::Index i = 0; i < game.m(); ++i) {
    report.residuals(i) = (p.col(i) - c(i) * s.u().col(i)).norm();
    const bool ok = report.residuals(i) <= report.bound + kResidualSlack;
    report.holds[static_cast<std::size_t>(i)] = ok;
    report.all_hold = report.all_hold && ok;
  }
  return report;
}

}  // namespace xorgame
