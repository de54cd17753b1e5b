#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "hmm/errors.hpp"

namespace {

int exit_code(hmm::Error::Category c) {
  using C = hmm::Error::Category;
  switch (c) {
    case C::config:
    case C::parse: return 2;
    case C::io: return 4;
    default: return 3;
  }
}

const char* category_name(hmm::Error::Category c) {
  using C = hmm::Error::Category;
  switch (c) {
    case C::range: return "range";
    case C::parse: return "parse";
    case C::domain: return "domain";
    case C::accuracy: return "accuracy";
    case C::config: return "config";
    case C::io: return "io";
  }
  return "unknown";
}

int report(const std::string& category, int code, const std::string& message, const std::string& path = {}) {
  nlohmann::json err{{"category", category}, {"exit_code", code}, {"message", message}};
  if (!path.empty()) err["path"] = path;
  std::cerr << nlohmann::json{{"error", err}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dipole emission in planar metal/dielectric multilayers"};
  app.set_version_flag("--version", hmm::app::version_string());
  app.require_subcommand(1, 1);

  std::string config_path;
  hmm::app::RunOptions opt;
  std::string out_dir, format;

  for (const auto& name : hmm::app::command_names()) {
    auto* sub = app.add_subcommand(name, fmt::format("run the {} computation", name));
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--format", format, "csv or json (overrides output.format)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", opt.threads, "worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", 2, e.what());
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (!out_dir.empty()) opt.out_dir = out_dir;
  if (!format.empty()) opt.format = format;

  bool configured = false;
  try {
    const auto config = hmm::app::load_config(config_path);
    configured = true;
    hmm::app::CommandResult result;
    const auto path = hmm::app::run(command, config, opt, &result);
    std::cout << result.summary << " -> " << path.string() << "\n";
    if (result.failure) return report("check", 3, *result.failure);
    return 0;
  } catch (const hmm::app::ConfigError& e) {
    return report("config", 2, e.what(), e.path());
  } catch (const hmm::Error& e) {
    // Material tables and the like fail while the config is being read.
    const int code = !configured && e.category() != hmm::Error::Category::io ? 2 : exit_code(e.category());
    return report(category_name(e.category()), code, e.what());
  } catch (const std::exception& e) {
    return report("internal", 3, e.what());
  }
}
