#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "hmmstack_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

Run hmmstack(const std::string& args) {
  const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + HMMSTACK_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
#ifdef _WIN32
  const int code = status;
#else
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
  return {code, slurp(out), slurp(err)};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

// Data rows and header, with comment lines dropped.
std::vector<std::string> body(const std::string& csv) {
  std::vector<std::string> out;
  for (auto& l : lines(csv))
    if (l.empty() || l[0] != '#') out.push_back(l);
  return out;
}

std::vector<double> column(const std::string& csv, const std::string& name) {
  const auto b = body(csv);
  std::vector<std::string> header;
  std::stringstream hs(b.at(0));
  for (std::string c; std::getline(hs, c, ',');) header.push_back(c);
  const auto idx = static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  REQUIRE(idx < header.size());
  std::vector<double> v;
  for (std::size_t i = 1; i < b.size(); ++i) {
    std::stringstream rs(b[i]);
    std::string cell;
    for (std::size_t k = 0; k <= idx; ++k) std::getline(rs, cell, ',');
    v.push_back(std::stod(cell));
  }
  return v;
}

std::string out_arg(const std::string& sub) {
  const auto d = scratch() / sub;
  return " --out \"" + d.string() + "\"";
}

}  // namespace

TEST_CASE("version and usage") {
  const auto v = hmmstack("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("hmmstack") != std::string::npos);
  CHECK(hmmstack("").code != 0);
  const auto missing = hmmstack("purcell");
  CHECK(missing.code == 2);
  CHECK(nlohmann::json::parse(missing.err)["error"]["exit_code"] == 2);
}

TEST_CASE("every subcommand writes its CSV with the documented header") {
  const auto cfg = write_config("all.json", R"({
    "stack": "au-zns",
    "dipole": {"band": {"min_nm": 700, "max_nm": 900, "n_points": 5}},
    "spectrum": {"s_max": 5, "n_points": 51},
    "farfield": {"n_theta": 91},
    "validate": {"gaps_nm": [2, 5, 10, 20]},
    "sweep": {"parameters": [{"path": "stack.layers[2].thickness_nm", "min": 30, "max": 60, "n_points": 4}],
              "objective": "fp_perp", "wavelength_nm": 900}})");
  const std::vector<std::pair<std::string, std::string>> expected{
      {"emt", "wavelength_nm,re_eps_perp,im_eps_perp,re_eps_par,im_eps_par,is_hyperbolic"},
      {"purcell", "wavelength_nm,gamma_perp,gamma_par,gamma_theta,err_estimate"},
      {"spectrum", "s,K_perp,K_par"},
      {"farfield", "side,theta_deg,p"},
      {"cpr", "wavelength_nm,fp,qe,ce_rad,ce_tot,cpr"},
      {"sweep", "stack.layers[2].thickness_nm,fp_perp,qe,ce_tot,cpr,objective"},
      {"validate",
       "gap_nm,gamma_perp,radiative,plasmon,nonradiative,oracle_total,oracle_nonradiative,nonradiative_rel_dev"},
  };
  const auto single = write_config("single.json", R"({"stack": "au-zns", "dipole": {"wavelength_nm": 900},
    "spectrum": {"s_max": 5, "n_points": 51}, "farfield": {"n_theta": 91}})");
  for (const auto& [cmd, header] : expected) {
    CAPTURE(cmd);
    const auto& use = cmd == "spectrum" || cmd == "farfield" ? single : cfg;
    const auto r = hmmstack(cmd + " --config \"" + use.string() + "\"" + out_arg("all") + " --threads 2");
    CHECK(r.code == 0);
    CHECK_FALSE(r.out.empty());
    const auto text = slurp(scratch() / "all" / (cmd + ".csv"));
    REQUIRE_FALSE(text.empty());
    CHECK(text.rfind("# hmmstack ", 0) == 0);
    CHECK(body(text).at(0) == header);
    CHECK(body(text).size() > 1);
  }
  CHECK(column(slurp(scratch() / "all" / "purcell.csv"), "gamma_perp").size() == 5);
  CHECK(column(slurp(scratch() / "all" / "spectrum.csv"), "s").size() == 51);
  // A band is rejected where a single wavelength is required.
  const auto r = hmmstack("spectrum --config \"" + cfg.string() + "\"" + out_arg("band"));
  CHECK(r.code == 2);
  CHECK(nlohmann::json::parse(r.err)["error"]["path"] == "dipole.wavelength_nm");
}

TEST_CASE("purcell: ZnS beats PVA at 900 nm") {
  auto gamma = [](const std::string& preset) {
    const auto cfg = write_config(preset + ".json",
                                  R"({"stack": ")" + preset + R"(", "dipole": {"wavelength_nm": 900, "theta_deg": 0}})");
    const auto r = hmmstack("purcell --config \"" + cfg.string() + "\"" + out_arg(preset));
    REQUIRE(r.code == 0);
    return column(slurp(scratch() / preset / "purcell.csv"), "gamma_perp").at(0);
  };
  CHECK(gamma("au-zns") > gamma("au-pva"));
}

TEST_CASE("cpr of a vacuum stack") {
  const auto cfg = write_config("vac.json", R"({
    "stack": {"lower": "vacuum", "upper": "vacuum", "layers": [{"material": "vacuum", "thickness_nm": 100}]},
    "dipole": {"band": {"min_nm": 500, "max_nm": 1000, "n_points": 6}, "host_layer": 1}})");
  const auto r = hmmstack("cpr --config \"" + cfg.string() + "\"" + out_arg("vac"));
  REQUIRE(r.code == 0);
  for (double v : column(slurp(scratch() / "vac" / "cpr.csv"), "cpr")) CHECK(v == doctest::Approx(0.273).epsilon(2e-3));
}

TEST_CASE("validate passes the Drexhage check") {
  const auto cfg = write_config("val.json", "{}");
  const auto r = hmmstack("validate --config \"" + cfg.string() + "\"" + out_arg("val"));
  CHECK(r.code == 0);
  const auto gaps = column(slurp(scratch() / "val" / "validate.csv"), "gap_nm");
  CHECK(gaps.front() == 2.0);
  CHECK(gaps.back() == 50.0);
}

TEST_CASE("identical configs give identical files for any thread count") {
  const auto cfg = write_config("det.json", R"({"stack": "au-pva-zns",
    "dipole": {"band": {"min_nm": 650, "max_nm": 1000, "n_points": 8}, "theta_deg": 30}})");
  for (const std::string cmd : {"cpr", "purcell"}) {
    REQUIRE(hmmstack(cmd + " --config \"" + cfg.string() + "\"" + out_arg("t1") + " --threads 1").code == 0);
    REQUIRE(hmmstack(cmd + " --config \"" + cfg.string() + "\"" + out_arg("t5") + " --threads 5").code == 0);
    CHECK(body(slurp(scratch() / "t1" / (cmd + ".csv"))) == body(slurp(scratch() / "t5" / (cmd + ".csv"))));
    CHECK(slurp(scratch() / "t1" / (cmd + ".csv")) == slurp(scratch() / "t5" / (cmd + ".csv")));
  }
}

TEST_CASE("json output format") {
  const auto cfg = write_config("js.json", R"({"stack": "au-zns", "dipole": {"wavelength_nm": 800}})");
  const auto r = hmmstack("purcell --config \"" + cfg.string() + "\"" + out_arg("js") + " --format json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(scratch() / "js" / "purcell.json"));
  CHECK(j["columns"][1] == "gamma_perp");
  CHECK(j["rows"].size() == 1);
}

TEST_CASE("failures exit with the documented codes and leave no files") {
  const auto bad = write_config("bad.json", R"({"stack": {"lower": "glass", "upper": "air",
      "layers": [{"material": "zns", "thickness_nm": -5}]}, "dipole": {"wavelength_nm": 900, "host_layer": 1}})");
  auto r = hmmstack("purcell --config \"" + bad.string() + "\"" + out_arg("bad"));
  CHECK(r.code == 2);
  const auto err = nlohmann::json::parse(r.err)["error"];
  CHECK(err["category"] == "config");
  CHECK(err["path"] == "stack.layers[0].thickness_nm");
  CHECK_FALSE(fs::exists(scratch() / "bad" / "purcell.csv"));

  // Numerical failure: the emitter sits on top of the gold.
  const auto touch = write_config("touch.json", R"({"stack": {"lower": "au", "upper": "air",
      "layers": [{"material": "air", "thickness_nm": 100}]}, "dipole": {"wavelength_nm": 650, "host_layer": 1, "z_nm": 0.0001}})");
  r = hmmstack("purcell --config \"" + touch.string() + "\"" + out_arg("touch"));
  CHECK(r.code == 3);
  CHECK(nlohmann::json::parse(r.err)["error"]["category"] == "accuracy");
  CHECK_FALSE(fs::exists(scratch() / "touch" / "purcell.csv"));

  // Outside the gold table.
  const auto range = write_config("range.json", R"({"stack": "au-zns", "dipole": {"wavelength_nm": 1500}})");
  CHECK(hmmstack("purcell --config \"" + range.string() + "\"" + out_arg("range")).code == 3);

  // Output directory cannot be created.
  const auto ok = write_config("ok.json", R"({"stack": "au-zns", "dipole": {"wavelength_nm": 900}})");
  const auto blocker = scratch() / "blocker";
  std::ofstream(blocker) << "x";
  r = hmmstack("purcell --config \"" + ok.string() + "\" --out \"" + (blocker / "sub").string() + "\"");
  CHECK(r.code == 4);
  CHECK(nlohmann::json::parse(r.err)["error"]["category"] == "io");

  for (const auto& e : fs::recursive_directory_iterator(scratch()))
    CHECK(e.path().extension() != ".partial");
}
