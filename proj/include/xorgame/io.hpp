#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xorgame/algebra.hpp"
#include "xorgame/approx.hpp"
#include "xorgame/games.hpp"
#include "xorgame/solver.hpp"
#include "xorgame/strategy.hpp"

namespace xorgame {

using Json = nlohmann::ordered_json;

/// Serializes with every float printed at 17 significant digits. Throws
/// InvalidArgument on NaN or infinity.
std::string dump_json(const Json& j, int indent = 2);
std::string format_double(double x);

Json game_to_json(const Game& g);
Game game_from_json(const Json& j);
Game read_game(const std::string& path);

/// One "i j" pair per line, 1-based; blank lines and lines starting with '#'
/// are skipped. Without `vertices` the largest endpoint is used.
Graph read_graph(const std::string& path, std::optional<int> vertices = std::nullopt);

Json matrix_to_json(const Mat& m);
Json complex_matrix_to_json(const CMat& m);
Json solution_to_json(const SdpSolution& s);
Json certificate_to_json(const CliffordCertificate& c);
Json strategy_to_json(const QuantumStrategy& s);

/// Rows of comma-separated cells, with a header line.
std::string to_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

std::string read_text(const std::string& path);

/// Writes through a temporary file in the same directory and renames it into
/// place. An empty path or "-" writes to standard output.
void write_output(const std::string& path, const std::string& content);

}  // namespace xorgame
