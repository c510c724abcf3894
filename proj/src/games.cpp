#include "xorgame/games.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

constexpr double kInputNormTol = 1e-9;
constexpr int kMaxEnumeratedSide = 24;
constexpr int kMaxCliffordGenerators = 12;

}  // namespace

Game Game::from_matrix(const Mat& matrix, bool normalize) {
  if (matrix.rows() == 0 || matrix.cols() == 0)
    throw Error(ErrorCode::InvalidArgument, "cost matrix is empty");
  if (!matrix.allFinite()) throw Error(ErrorCode::InvalidArgument, "cost matrix has non-finite entries");
  const double total = matrix.cwiseAbs().sum();
  if (total == 0.0) throw Error(ErrorCode::AllZeroMatrix, "all entries are zero");
  if (normalize) return Game(matrix / total);
  if (std::abs(total - 1.0) > kInputNormTol)
    throw Error(ErrorCode::NotNormalized, "sum of |G_ij| is " + std::to_string(total));
  return Game(matrix);
}

bool Game::has_zero_row() const {
  for (Eigen::Index i = 0; i < m(); ++i)
    if (cost_.row(i).cwiseAbs().maxCoeff() == 0.0) return true;
  return false;
}

bool Game::has_zero_column() const {
  for (Eigen::Index j = 0; j < n(); ++j)
    if (cost_.col(j).cwiseAbs().maxCoeff() == 0.0) return true;
  return false;
}

Graph::Graph(int vertices, std::vector<Edge> edges) : vertices_(vertices), edges_(std::move(edges)) {
  if (vertices_ < 1) throw Error(ErrorCode::InvalidArgument, "graph needs at least one vertex");
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, "self-loop at vertex " + std::to_string(e.i));
    if (e.i < 1 || e.j > vertices_)
      throw Error(ErrorCode::InvalidArgument,
                  "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ") out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw Error(ErrorCode::InvalidArgument, "duplicate edge");
}

Game graph_game(const Graph& g) {
  const auto e = static_cast<Eigen::Index>(g.edges().size());
  if (e == 0) throw Error(ErrorCode::EmptyGraph, "graph has no edges");
  const double w = 1.0 / (4.0 * static_cast<double>(e));
  Mat cost = Mat::Zero(2 * e, g.vertices());
  for (Eigen::Index k = 0; k < e; ++k) {
    const auto& edge = g.edges()[static_cast<std::size_t>(k)];
    cost(2 * k, edge.i - 1) = w;
    cost(2 * k, edge.j - 1) = -w;
    cost(2 * k + 1, edge.i - 1) = w;
    cost(2 * k + 1, edge.j - 1) = w;
  }
  return Game::from_matrix(cost, false);
}

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

Game chsh_game(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "CHSH(n) needs n >= 2");
  return graph_game(complete_graph(n));
}

Game tight_game(int n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "tight game needs n >= 2");
  const Eigen::Index m = static_cast<Eigen::Index>(n) * (n - 1) / 2;
  const double w = 1.0 / (2.0 * static_cast<double>(m));
  Mat cost = Mat::Zero(m, n);
  Eigen::Index row = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++row) {
      cost(row, i) = w;
      cost(row, j) = -w;
    }
  }
  return Game::from_matrix(cost, false);
}

bool monomials_anticommute(std::uint32_t s, std::uint32_t t) {
  const int parity = std::popcount(s) * std::popcount(t) - std::popcount(s & t);
  return (parity & 1) != 0;
}

CliffordGraph cl_graph(int n) {
  if (n < 2 || n > kMaxCliffordGenerators)
    throw Error(ErrorCode::InvalidArgument, "CL(n) supports 2 <= n <= 12");
  std::vector<std::uint32_t> subsets;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) subsets.push_back(mask);
  // Size first, then lexicographic on the sorted element list. Reversing the
  // bits makes the integer order agree with the lexicographic order.
  const auto lex_key = [n](std::uint32_t mask) {
    std::uint32_t key = 0;
    for (int b = 0; b < n; ++b)
      if (mask & (1u << b)) key |= 1u << (n - 1 - b);
    return key;
  };
  std::sort(subsets.begin(), subsets.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return lex_key(a) > lex_key(b);
  });
  std::vector<Edge> edges;
  const int v = static_cast<int>(subsets.size());
  for (int a = 0; a < v; ++a)
    for (int b = a + 1; b < v; ++b)
      if (monomials_anticommute(subsets[static_cast<std::size_t>(a)], subsets[static_cast<std::size_t>(b)]))
        edges.push_back({a + 1, b + 1});
  return {Graph(v, std::move(edges)), std::move(subsets)};
}

Game cl_game(int n) { return graph_game(cl_graph(n).graph); }

double classical_bias(const Game& game) {
  // Enumerate signs y on the short side; the long side answers with
  // sign(row . y), contributing |row . y| per row.
  const Mat g = game.m() < game.n() ? Mat(game.cost().transpose()) : game.cost();
  const Eigen::Index k = g.cols();
  if (k > kMaxEnumeratedSide) throw Error(ErrorCode::TooLarge, "both question sets exceed 24");
  // y and -y give the same value, so fix y_0 = +1 and walk the rest in Gray
  // code order, updating g*y by one column per step.
  Vec gy = g.rowwise().sum();
  double best = gy.cwiseAbs().sum();
  Eigen::VectorXi sign = Eigen::VectorXi::Ones(k);
  const std::uint64_t steps = std::uint64_t{1} << (k - 1);
  for (std::uint64_t step = 1; step < steps; ++step) {
    const int flip = std::countr_zero(step) + 1;
    sign(flip) = -sign(flip);
    gy += 2.0 * sign(flip) * g.col(flip);
    best = std::max(best, gy.cwiseAbs().sum());
  }
  return best;
}

int tsirelson_r(long m, long n) {
  if (m < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "question counts must be positive");
  long r = 0;
  while ((r + 1) * (r + 2) / 2 < m + n) ++r;
  return static_cast<int>(r);
}

}  // namespace xorgame
