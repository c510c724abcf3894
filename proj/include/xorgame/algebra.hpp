#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xorgame/games.hpp"
#include "xorgame/linalg.hpp"
#include "xorgame/monomial.hpp"

namespace xorgame {

/// One defining relation (sum_j a_j X_j)^2 = constant * Id, stored through the
/// non-zero coefficients a_j. The involution X_j^2 = Id is the case a = e_j.
struct QuadraticRelation {
  enum class Kind { Involution, Row };
  Kind kind = Kind::Involution;
  Eigen::Index index = 0;  // j for involutions, i for rows (0-based)
  std::vector<std::pair<Eigen::Index, double>> terms;
  double constant = 1.0;

  std::string id() const;
};

/// Generators X_1..X_n with X_j^2 = Id and (sum_j G_ij X_j)^2 = c_i^2 Id.
class SolutionAlgebra {
 public:
  SolutionAlgebra(Game game, Vec c2, std::vector<QuadraticRelation> relations)
      : game_(std::move(game)), c2_(std::move(c2)), relations_(std::move(relations)) {}

  Eigen::Index generators() const { return game_.n(); }
  const Game& game() const { return game_; }
  const Vec& c2() const { return c2_; }
  const std::vector<QuadraticRelation>& relations() const { return relations_; }

 private:
  Game game_;
  Vec c2_;
  std::vector<QuadraticRelation> relations_;  // n involutions, then m rows
};

SolutionAlgebra build_solution_algebra(const Game& game, const Vec& c);

struct CertificateOptions {
  double span_tol = 1e-9;  // singular values of the row-normalized relation matrix
  double rank_tol = 1e-7;  // eigenvalues of V
};

/// Coefficients writing the symmetrized product (X_k X_l + X_l X_k)/2 as
/// sum_j s_j X_j^2 + sum_i t_i (sum_j G_ij X_j)^2.
struct PairCoefficients {
  int k = 0;
  int l = 0;
  Vec s;
  Vec t;
  double residual = 0.0;
};

/// Outcome of the strong-Clifford test. When it succeeds every
/// anticommutator is a scalar, X_k X_l + X_l X_k = 2 V_kl Id, so V is the
/// Gram matrix of any optimal Bob vector family and has unit diagonal.
struct CliffordCertificate {
  bool strongly_clifford = false;
  int spanning_rank = 0;
  int spanning_target = 0;  // n(n+1)/2
  Mat v;                     // empty unless strongly Clifford
  std::vector<PairCoefficients> coeffs;
  int rank = 0;
  std::optional<long> min_dim;  // unknown for non-Clifford algebras
  std::optional<int> ebits;
};

CliffordCertificate strongly_clifford_certificate(const SolutionAlgebra& alg, const CertificateOptions& opts = {});

struct MinEntanglement {
  long min_dim = 1;
  int ebits = 0;
};

MinEntanglement min_entanglement(const CliffordCertificate& cert);
MinEntanglement min_entanglement_for_rank(int r);

/// r pairwise anticommuting Hermitian involutions of dimension
/// multiplicity * 2^floor(r/2), entries in {0, +-1, +-i}.
std::vector<MonomialMatrix> clifford_generator_monomials(int r, int multiplicity = 1);
std::vector<CMat> clifford_generators(int r, int multiplicity = 1);

/// Images i^C(k,2) Y_i1 ... Y_ik of the CL(n) vertices, in cl_graph order.
struct MonomialRepresentation {
  std::vector<std::uint32_t> subsets;
  std::vector<MonomialMatrix> images;
};

MonomialRepresentation cl_monomial_representation(int n);

/// Operator-norm defect of each relation at the given operators, in relation
/// order.
Vec relation_defects(const SolutionAlgebra& alg, const std::vector<CMat>& b);

/// Largest relation defect.
double verify_relations(const SolutionAlgebra& alg, const std::vector<CMat>& b);

}  // namespace xorgame
