#include "app/output.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "app/config.hpp"

#ifndef HMMSTACK_VERSION
#define HMMSTACK_VERSION "0.0.0"
#endif

namespace hmm::app {

std::string version_string() { return std::string("hmmstack ") + HMMSTACK_VERSION; }

namespace {

std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(double v) const {
      if (std::isnan(v)) return "nan";
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      return fmt::format("{:.12g}", v);
    }
    std::string operator()(long long v) const { return fmt::format("{}", v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const { return v; }
  } visit;
  return std::visit(visit, c);
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out = "# " + version_string() + "\n";
  for (const auto& n : t.notes) out += "# " + n + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              if (std::isfinite(v)) r[t.columns[i]] = v;
              else r[t.columns[i]] = nullptr;
            } else {
              r[t.columns[i]] = v;
            }
          },
          row[i]);
    }
    rows.push_back(std::move(r));
  }
  return {{"version", version_string()}, {"notes", t.notes}, {"columns", t.columns}, {"rows", rows}};
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw IoError("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace hmm::app
