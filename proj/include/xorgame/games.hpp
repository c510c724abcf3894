#pragma once

#include <cstdint>
#include <vector>

#include "xorgame/linalg.hpp"

namespace xorgame {

/// An m x n XOR game, stored as its cost matrix G with sum |G_ij| = 1.
/// The question distribution is |G_ij| and the required answer parity is
/// sign(G_ij); neither is stored separately.
class Game {
 public:
  /// Validates `matrix` and, when `normalize` is set, rescales it so that the
  /// absolute entries sum to one. Without `normalize` the input must already
  /// be normalized to within 1e-9.
  static Game from_matrix(const Mat& matrix, bool normalize);

  Eigen::Index m() const { return cost_.rows(); }
  Eigen::Index n() const { return cost_.cols(); }
  const Mat& cost() const { return cost_; }

  bool has_zero_row() const;
  bool has_zero_column() const;

 private:
  explicit Game(Mat cost) : cost_(std::move(cost)) {}
  Mat cost_;
};

struct Edge {
  int i = 0;  // 1-based, i < j
  int j = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Simple undirected graph on vertices 1..v. Edges are kept sorted
/// lexicographically; (j, i) inputs are stored as (i, j).
class Graph {
 public:
  Graph(int vertices, std::vector<Edge> edges);

  int vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int vertices_;
  std::vector<Edge> edges_;
};

Game graph_game(const Graph& g);
Graph complete_graph(int n);
Game chsh_game(int n);
Game tight_game(int n);

/// Anticommutation graph of the Clifford monomials on n generators. Vertex k
/// (0-based) is the subset subsets[k] of {1..n} encoded as a bit mask; subsets
/// are ordered by size, then lexicographically.
struct CliffordGraph {
  Graph graph;
  std::vector<std::uint32_t> subsets;
};

/// Monomials Y_S and Y_T anticommute iff |S||T| - |S n T| is odd.
bool monomials_anticommute(std::uint32_t s, std::uint32_t t);

CliffordGraph cl_graph(int n);
Game cl_game(int n);

/// Exact classical bias by enumerating signs on the smaller question side.
double classical_bias(const Game& game);

/// Largest r with r(r+1)/2 < m + n; floor(r/2) ebits always suffice.
int tsirelson_r(long m, long n);

}  // namespace xorgame
