#include "xorgame/algebra.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <bit>
#include <cmath>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

constexpr double kCertificateCellLimit = 4e7;
constexpr int kMaxCliffordRank = 24;
constexpr int kMaxClGenerators = 10;

// Index of the (k, l) coordinate, k <= l, in the packed upper triangle.
Eigen::Index packed_index(Eigen::Index k, Eigen::Index l, Eigen::Index n) {
  return k * n - k * (k - 1) / 2 + (l - k);
}

}  // namespace

std::string QuadraticRelation::id() const {
  return (kind == Kind::Involution ? "involution " : "row ") + std::to_string(index + 1);
}

SolutionAlgebra build_solution_algebra(const Game& game, const Vec& c) {
  if (c.size() != game.m()) throw Error(ErrorCode::LengthMismatch, "need one marginal bias per row");
  if ((c.array() < 0.0).any()) throw Error(ErrorCode::InvalidArgument, "marginal biases must be non-negative");
  std::vector<QuadraticRelation> relations;
  relations.reserve(static_cast<std::size_t>(game.n() + game.m()));
  for (Eigen::Index j = 0; j < game.n(); ++j)
    relations.push_back({QuadraticRelation::Kind::Involution, j, {{j, 1.0}}, 1.0});
  const Vec c2 = c.array().square();
  for (Eigen::Index i = 0; i < game.m(); ++i) {
    QuadraticRelation rel{QuadraticRelation::Kind::Row, i, {}, c2(i)};
    for (Eigen::Index j = 0; j < game.n(); ++j)
      if (game.cost()(i, j) != 0.0) rel.terms.emplace_back(j, game.cost()(i, j));
    relations.push_back(std::move(rel));
  }
  return SolutionAlgebra(game, c2, std::move(relations));
}

CliffordCertificate strongly_clifford_certificate(const SolutionAlgebra& alg, const CertificateOptions& opts) {
  const Eigen::Index n = alg.generators();
  const Eigen::Index p = n * (n + 1) / 2;
  const auto rels = static_cast<Eigen::Index>(alg.relations().size());
  if (static_cast<double>(p) * static_cast<double>(rels) > kCertificateCellLimit)
    throw Error(ErrorCode::TooLarge, "relation matrix too large for a dense spanning test");

  // Row r holds the coordinates of relation r's quadratic form in the basis
  // {X_k^2} u {X_k X_l + X_l X_k : k < l}; rows are scaled to unit length so
  // the rank threshold does not depend on the size of the entries of G.
  Mat a = Mat::Zero(rels, p);
  Vec constants(rels), scale(rels);
  for (Eigen::Index r = 0; r < rels; ++r) {
    const auto& rel = alg.relations()[static_cast<std::size_t>(r)];
    for (const auto& [j, gj] : rel.terms)
      for (const auto& [k, gk] : rel.terms)
        if (j <= k) a(r, packed_index(j, k, n)) = gj * gk;
    constants(r) = rel.constant;
    scale(r) = a.row(r).norm();
    if (scale(r) > 0.0) a.row(r) /= scale(r);
  }

  CliffordCertificate cert;
  cert.spanning_target = static_cast<int>(p);
  Eigen::BDCSVD<Mat> svd(a);
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()(k) > opts.span_tol) ++rank;
  cert.spanning_rank = rank;
  cert.strongly_clifford = rank == p;
  if (!cert.strongly_clifford) return cert;

  // Targets: (X_k X_l + X_l X_k)/2 has coordinate 1/2 at (k, l) for k < l and
  // is X_k^2 itself for k = l.
  Mat targets = Mat::Zero(p, p);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k; l < n; ++l) {
      const Eigen::Index idx = packed_index(k, l, n);
      targets(idx, idx) = k == l ? 1.0 : 0.5;
    }
  const Mat at = a.transpose();
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(at);
  const Mat scaled = cod.solve(targets);  // rels x p, minimum norm
  const Mat residual = at * scaled - targets;

  cert.v = Mat::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l) {
      const Eigen::Index idx = packed_index(k, l, n);
      const Vec x = scaled.col(idx).cwiseQuotient(scale.cwiseMax(std::numeric_limits<double>::min()));
      PairCoefficients pc;
      pc.k = static_cast<int>(k);
      pc.l = static_cast<int>(l);
      pc.s = x.head(n);
      pc.t = x.tail(rels - n);
      pc.residual = residual.col(idx).norm();
      if (k != l) {
        const double value = x.dot(constants);
        cert.v(k, l) = value;
        cert.v(l, k) = value;
      }
      cert.coeffs.push_back(std::move(pc));
    }
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(cert.v, Eigen::EigenvaluesOnly);
  cert.rank = static_cast<int>((es.eigenvalues().array().abs() > opts.rank_tol).count());
  const MinEntanglement me = min_entanglement_for_rank(cert.rank);
  cert.min_dim = me.min_dim;
  cert.ebits = me.ebits;
  return cert;
}

MinEntanglement min_entanglement_for_rank(int r) {
  if (r < 0) throw Error(ErrorCode::InvalidArgument, "rank must be non-negative");
  return {1L << (r / 2), r / 2};
}

MinEntanglement min_entanglement(const CliffordCertificate& cert) {
  if (!cert.strongly_clifford)
    throw Error(ErrorCode::NotClifford, "minimum dimension is unknown for non-Clifford solution algebras");
  return min_entanglement_for_rank(cert.rank);
}

std::vector<MonomialMatrix> clifford_generator_monomials(int r, int multiplicity) {
  if (r < 0 || r > kMaxCliffordRank) throw Error(ErrorCode::TooLarge, "Clifford rank must be in [0, 24]");
  if (multiplicity < 1) throw Error(ErrorCode::InvalidArgument, "multiplicity must be positive");
  const int pairs = r / 2;
  const auto x = MonomialMatrix::pauli_x();
  const auto y = MonomialMatrix::pauli_y();
  const auto z = MonomialMatrix::pauli_z();
  const auto id2 = MonomialMatrix::identity(2);

  // Jordan-Wigner chain: Z...Z (X or Y) I...I.
  std::vector<MonomialMatrix> gens;
  for (int a = 0; a < pairs; ++a) {
    for (const auto* local : {&x, &y}) {
      MonomialMatrix g = MonomialMatrix::identity(1);
      for (int q = 0; q < pairs; ++q) g = g.kron(q < a ? z : (q == a ? *local : id2));
      gens.push_back(std::move(g));
    }
  }
  if (r % 2 == 1) {
    MonomialMatrix prod = MonomialMatrix::identity(std::size_t{1} << pairs);
    for (const auto& g : gens) prod = prod * g;
    for (int k = 0; k < 4; ++k) {
      MonomialMatrix cand = prod.times_i_power(k);
      if (cand.is_hermitian() && (cand * cand).is_identity()) {
        gens.push_back(std::move(cand));
        break;
      }
    }
  }
  if (multiplicity > 1) {
    const auto block = MonomialMatrix::identity(static_cast<std::size_t>(multiplicity));
    for (auto& g : gens) g = block.kron(g);
  }
  return gens;
}

std::vector<CMat> clifford_generators(int r, int multiplicity) {
  std::vector<CMat> out;
  for (const auto& g : clifford_generator_monomials(r, multiplicity)) out.push_back(g.to_dense());
  return out;
}

MonomialRepresentation cl_monomial_representation(int n) {
  if (n < 2 || n > kMaxClGenerators) throw Error(ErrorCode::InvalidArgument, "CL(n) representation needs 2 <= n <= 10");
  const auto gens = clifford_generator_monomials(n, 1);
  MonomialRepresentation rep;
  rep.subsets = cl_graph(n).subsets;
  for (const std::uint32_t s : rep.subsets) {
    MonomialMatrix img = MonomialMatrix::identity(gens.front().dim());
    for (int b = 0; b < n; ++b)
      if (s & (1u << b)) img = img * gens[static_cast<std::size_t>(b)];
    const int k = std::popcount(s);
    rep.images.push_back(img.times_i_power(k * (k - 1) / 2));
  }
  return rep;
}

Vec relation_defects(const SolutionAlgebra& alg, const std::vector<CMat>& b) {
  if (static_cast<Eigen::Index>(b.size()) != alg.generators())
    throw Error(ErrorCode::DimensionMismatch, "need one operator per generator");
  const Eigen::Index dim = b.empty() ? 0 : b.front().rows();
  for (const auto& op : b)
    if (op.rows() != dim || op.cols() != dim)
      throw Error(ErrorCode::DimensionMismatch, "operators must share one square dimension");
  Vec out(static_cast<Eigen::Index>(alg.relations().size()));
  const CMat id = CMat::Identity(dim, dim);
  for (std::size_t r = 0; r < alg.relations().size(); ++r) {
    const auto& rel = alg.relations()[r];
    CMat lin = CMat::Zero(dim, dim);
    for (const auto& [j, coef] : rel.terms) lin += coef * b[static_cast<std::size_t>(j)];
    out(static_cast<Eigen::Index>(r)) = operator_norm(CMat(lin * lin - rel.constant * id));
  }
  return out;
}

double verify_relations(const SolutionAlgebra& alg, const std::vector<CMat>& b) {
  const Vec d = relation_defects(alg, b);
  return d.size() == 0 ? 0.0 : d.maxCoeff();
}

}  // namespace xorgame
