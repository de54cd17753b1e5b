#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace hmm::app {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // emitted as `# ` lines after the version header
};

std::string version_string();

/// Header comment, notes, column row, then one line per row. Doubles use 12 significant digits.
std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

/// Writes through a temporary file in the same directory and renames it into
/// place, so a failed run never leaves a truncated artifact.
void write_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace hmm::app
