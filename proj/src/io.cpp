#include "xorgame/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "xorgame/error.hpp"

namespace xorgame {

namespace {

void dump_string(const std::string& s, std::string& out) {
  out += Json(s).dump();
}

void dump_value(const Json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  // Arrays of scalars stay on one line so matrices read row by row.
  const auto flat = [](const Json& arr) {
    for (const auto& e : arr)
      if (e.is_structured()) return false;
    return true;
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_string(it.key(), out);
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty() || flat(j)) {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k > 0) out += indent < 0 ? "," : ", ";
          dump_value(j[k], indent, depth + 1, out);
        }
        out += ']';
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k > 0) out += ',';
        newline(depth + 1);
        dump_value(j[k], indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Mat matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a non-empty array");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw Error(ErrorCode::ParseError, std::string(what) + " rows must be arrays");
  const std::size_t cols = j[0].size();
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw Error(ErrorCode::ParseError, std::string(what) + " rows must all have the same length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " entries must be numbers");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "refusing to serialize a non-finite number");
  if (x == 0.0) return "0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_value(j, indent, 0, out);
  if (indent >= 0) out += '\n';
  return out;
}

Json game_to_json(const Game& g) {
  Json j;
  j["m"] = g.m();
  j["n"] = g.n();
  j["cost"] = matrix_to_json(g.cost());
  return j;
}

Game game_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("cost")) throw Error(ErrorCode::ParseError, "game JSON needs a \"cost\" matrix");
  const Mat cost = matrix_from_json(j["cost"], "cost");
  for (const char* key : {"m", "n"}) {
    if (!j.contains(key)) continue;
    if (!j[key].is_number_integer()) throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" must be an integer");
    const auto expect = std::string(key) == "m" ? cost.rows() : cost.cols();
    if (j[key].get<long>() != expect)
      throw Error(ErrorCode::ParseError, std::string("\"") + key + "\" does not match the cost matrix");
  }
  return Game::from_matrix(cost, false);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Game read_game(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  return game_from_json(j);
}

Graph read_graph(const std::string& path, std::optional<int> vertices) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<Edge> edges;
  int max_vertex = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    long i = 0, j = 0;
    std::string rest;
    if (!(ls >> i >> j) || (ls >> rest))
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected \"i j\"");
    if (i < 1 || j < 1 || i > 1 << 20 || j > 1 << 20)
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": vertices are 1-based");
    edges.push_back({static_cast<int>(i), static_cast<int>(j)});
    max_vertex = std::max({max_vertex, static_cast<int>(i), static_cast<int>(j)});
  }
  return Graph(vertices.value_or(max_vertex), std::move(edges));
}

Json matrix_to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_to_json(m.row(r).transpose()));
  return out;
}

Json complex_matrix_to_json(const CMat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    out.push_back(std::move(row));
  }
  return out;
}

Json solution_to_json(const SdpSolution& s) {
  Json j;
  j["primal"] = s.primal_value;
  j["dual"] = s.dual_value;
  j["gap"] = s.gap;
  j["c"] = vec_to_json(s.c);
  j["d"] = vec_to_json(s.d);
  j["slack_min_eig"] = s.slack_min_eig;
  j["N"] = s.strategy.dimension();
  j["u"] = matrix_to_json(s.strategy.u().transpose());
  j["v"] = matrix_to_json(s.strategy.v().transpose());
  j["certified"] = s.certified;
  return j;
}

Json certificate_to_json(const CliffordCertificate& c) {
  Json j;
  j["strongly_clifford"] = c.strongly_clifford;
  j["V"] = c.strongly_clifford ? matrix_to_json(c.v) : Json(nullptr);
  j["rank"] = c.strongly_clifford ? Json(c.rank) : Json(nullptr);
  j["min_dim"] = c.min_dim ? Json(*c.min_dim) : Json(nullptr);
  j["ebits"] = c.ebits ? Json(*c.ebits) : Json(nullptr);
  j["spanning_rank"] = c.spanning_rank;
  j["spanning_target"] = c.spanning_target;
  if (!c.strongly_clifford) j["min_dim_lower_bound"] = 1;
  return j;
}

Json strategy_to_json(const QuantumStrategy& s) {
  Json j;
  j["d1"] = s.d1();
  j["d2"] = s.d2();
  Json a = Json::array(), b = Json::array();
  for (const auto& op : s.a()) a.push_back(complex_matrix_to_json(op));
  for (const auto& op : s.b()) b.push_back(complex_matrix_to_json(op));
  j["A"] = std::move(a);
  j["B"] = std::move(b);
  Json psi = Json::array();
  for (Eigen::Index k = 0; k < s.psi().size(); ++k) {
    psi.push_back(s.psi()(k).real());
    psi.push_back(s.psi()(k).imag());
  }
  j["psi"] = std::move(psi);
  return j;
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k > 0) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::InvalidArgument, "cannot rename into " + path + ": " + ec.message());
  }
}

}  // namespace xorgame
