#include "app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hmm::app {

using nlohmann::json;

namespace {

// A JSON node together with its dotted location, for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_, what); }

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        std::string list;
        for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        throw ConfigError(child_path(key), "unknown key; allowed keys here: " + list);
      }
    }
  }

  bool has(std::string_view key) const { return j_.is_object() && j_.contains(key); }
  Node operator[](std::string_view key) const {
    return Node(j_.at(std::string(key)), child_path(key));
  }
  Node at(std::size_t i) const { return Node(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0, got " + format(v));
    return v;
  }
  std::size_t count() const {
    const double v = number();
    if (v < 0.0 || v != std::floor(v) || v > 1e15) fail("expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  static std::string format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

 private:
  std::string child_path(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& j_;
  std::string path_;
};

Band parse_band(const Node& n) {
  n.require_object({"min_nm", "max_nm", "n_points"});
  Band b;
  b.min_nm = n["min_nm"].positive();
  b.max_nm = n["max_nm"].positive();
  b.n_points = n.has("n_points") ? n["n_points"].count() : 2;
  if (b.n_points < 1) n["n_points"].fail("must be >= 1");
  if (b.n_points == 1 && b.min_nm != b.max_nm) n["n_points"].fail("one point needs min_nm == max_nm");
  if (b.n_points > 1 && !(b.max_nm > b.min_nm)) n["max_nm"].fail("must exceed min_nm");
  return b;
}

json band_json(const Band& b) {
  return {{"min_nm", b.min_nm}, {"max_nm", b.max_nm}, {"n_points", b.n_points}};
}

MaterialSpec parse_material(const Node& n, const std::filesystem::path& base_dir) {
  if (!n.raw().is_object() || !n.has("model")) n.fail("expected an object with a \"model\" key");
  const std::string model = n["model"].string();
  MaterialSpec m;
  if (model == "constant") {
    n.require_object({"model", "n", "k", "band_nm"});
    m.kind = MaterialSpec::Kind::constant;
    m.n = n["n"].positive();
    m.k = n.has("k") ? n["k"].number() : 0.0;
    if (m.k < 0.0) n["k"].fail("must be >= 0 (passive material)");
  } else if (model == "drude") {
    n.require_object({"model", "eps_inf", "plasma_ev", "damping_ev", "band_nm"});
    m.kind = MaterialSpec::Kind::drude;
    m.eps_inf = n.has("eps_inf") ? n["eps_inf"].number() : 1.0;
    m.plasma_ev = n["plasma_ev"].positive();
    m.damping_ev = n["damping_ev"].positive();
  } else if (model == "table") {
    n.require_object({"model", "file"});
    m.kind = MaterialSpec::Kind::table;
    m.file = n["file"].string();
    const auto p = base_dir / m.file;
    if (!std::filesystem::is_regular_file(p)) n["file"].fail("file not found: " + p.string());
  } else {
    n["model"].fail("unknown material model '" + model + "'; expected constant, drude or table");
  }
  if (n.has("band_nm")) {
    const Node b = n["band_nm"];
    if (!b.raw().is_array() || b.raw().size() != 2) b.fail("expected [min_nm, max_nm]");
    const double lo = b.at(0).positive(), hi = b.at(1).positive();
    if (!(hi > lo)) b.fail("band must have max > min");
    m.band_nm = std::make_pair(lo, hi);
  } else if (m.kind == MaterialSpec::Kind::drude) {
    n.fail("a drude material needs band_nm");
  }
  return m;
}

json material_json(const MaterialSpec& m) {
  json j;
  switch (m.kind) {
    case MaterialSpec::Kind::constant:
      j = {{"model", "constant"}, {"n", m.n}, {"k", m.k}};
      break;
    case MaterialSpec::Kind::drude:
      j = {{"model", "drude"}, {"eps_inf", m.eps_inf}, {"plasma_ev", m.plasma_ev},
           {"damping_ev", m.damping_ev}};
      break;
    case MaterialSpec::Kind::table:
      j = {{"model", "table"}, {"file", m.file}};
      break;
  }
  if (m.band_nm) j["band_nm"] = {m.band_nm->first, m.band_nm->second};
  return j;
}

Material make_material(const std::string& name, const MaterialSpec& m,
                       const std::filesystem::path& base_dir) {
  switch (m.kind) {
    case MaterialSpec::Kind::constant:
      if (m.band_nm) return Material::constant_index(name, m.n, m.k, {m.band_nm->first, m.band_nm->second});
      return Material::constant_index(name, m.n, m.k);
    case MaterialSpec::Kind::drude:
      return Material::drude_lorentz(name, {m.eps_inf, m.plasma_ev, m.damping_ev, {}},
                                     {m.band_nm->first, m.band_nm->second});
    case MaterialSpec::Kind::table: {
      std::ifstream in(base_dir / m.file);
      if (!in) throw ConfigError("materials." + name + ".file", "cannot open " + m.file);
      return parse_nk_table(in, name, m.file);
    }
  }
  throw ConfigError("materials." + name, "unsupported material model");
}

struct PresetDefaults {
  std::size_t host_layer;
  std::optional<double> z_nm;
};

StackSpec stack_from(const LayerStack& s) {
  StackSpec out;
  out.lower = s.lower_cladding().name();
  out.upper = s.upper_cladding().name();
  for (const auto& l : s.layers()) out.layers.push_back({l.material.name(), l.thickness_nm});
  return out;
}

std::pair<StackSpec, std::optional<PresetDefaults>> parse_stack(const Node& n) {
  std::string preset;
  if (n.raw().is_string()) {
    preset = n.string();
  } else if (n.raw().is_object() && n.has("preset")) {
    n.require_object({"preset"});
    preset = n["preset"].string();
  }
  if (!preset.empty()) {
    LayerStack s = [&] {
      try {
        return preset_stack(preset);
      } catch (const Error& e) {
        n.fail(e.what());
      }
    }();
    PresetDefaults d = preset == "coverslip" ? PresetDefaults{1, 20.0} : PresetDefaults{kPresetHostLayer, {}};
    return {stack_from(s), d};
  }

  n.require_object({"lower", "layers", "upper"});
  StackSpec s;
  s.lower = n["lower"].string();
  s.upper = n["upper"].string();
  if (n.has("layers")) {
    const Node layers = n["layers"];
    if (!layers.raw().is_array()) layers.fail("expected an array");
    for (std::size_t i = 0; i < layers.raw().size(); ++i) {
      const Node l = layers.at(i);
      l.require_object({"material", "thickness_nm"});
      LayerSpec spec;
      spec.material = l["material"].string();
      spec.thickness_nm = l["thickness_nm"].number();
      if (!(spec.thickness_nm > 0.0))
        l["thickness_nm"].fail("layer thickness must be > 0, got " + Node::format(spec.thickness_nm));
      s.layers.push_back(spec);
    }
  }
  return {s, std::nullopt};
}

json stack_json(const StackSpec& s) {
  json layers = json::array();
  for (const auto& l : s.layers) layers.push_back({{"material", l.material}, {"thickness_nm", l.thickness_nm}});
  return {{"lower", s.lower}, {"layers", layers}, {"upper", s.upper}};
}

DipoleSpec parse_dipole(const Node& n, const std::optional<PresetDefaults>& defaults) {
  n.require_object({"wavelength_nm", "band", "host_layer", "z_nm", "z_fraction", "theta_deg"});
  DipoleSpec d;
  if (n.has("wavelength_nm")) d.wavelength_nm = n["wavelength_nm"].positive();
  if (n.has("band")) d.band = parse_band(n["band"]);
  if (d.wavelength_nm && d.band) n.fail("give either wavelength_nm or band, not both");
  if (!d.wavelength_nm && !d.band) n.fail("needs wavelength_nm or band");

  if (n.has("host_layer")) {
    d.host_layer = n["host_layer"].count();
  } else if (defaults) {
    d.host_layer = defaults->host_layer;
  } else {
    n.fail("needs host_layer (medium index: 0 lower cladding, 1..N layers, N+1 upper cladding)");
  }

  if (n.has("z_nm") && n.has("z_fraction")) n.fail("give either z_nm or z_fraction, not both");
  if (n.has("z_nm")) {
    d.z_nm = n["z_nm"].number();
  } else if (n.has("z_fraction")) {
    d.z_fraction = n["z_fraction"].number();
    if (!(*d.z_fraction > 0.0 && *d.z_fraction < 1.0)) n["z_fraction"].fail("must lie in (0, 1)");
  } else if (defaults && defaults->z_nm) {
    d.z_nm = defaults->z_nm;
  } else {
    d.z_fraction = 0.5;
  }

  d.theta_deg = n.has("theta_deg") ? n["theta_deg"].number() : 0.0;
  if (!(d.theta_deg >= 0.0 && d.theta_deg <= 90.0)) n["theta_deg"].fail("must lie in [0, 90]");
  return d;
}

json dipole_json(const DipoleSpec& d) {
  json j{{"host_layer", d.host_layer}, {"theta_deg", d.theta_deg}};
  if (d.wavelength_nm) j["wavelength_nm"] = *d.wavelength_nm;
  if (d.band) j["band"] = band_json(*d.band);
  if (d.z_nm) j["z_nm"] = *d.z_nm;
  if (d.z_fraction) j["z_fraction"] = *d.z_fraction;
  return j;
}

void check_dipole_geometry(const DipoleSpec& d, const StackSpec& s, const Node& n) {
  const std::size_t media = s.layers.size() + 2;
  if (d.host_layer >= media)
    n["host_layer"].fail("medium index " + std::to_string(d.host_layer) + " is outside 0.." +
                         std::to_string(media - 1));
  const bool cladding = d.host_layer == 0 || d.host_layer == media - 1;
  if (cladding) {
    if (d.z_fraction) n.fail("z_fraction needs a finite host layer; give z_nm for a cladding");
    if (!(*d.z_nm > 0.0)) n["z_nm"].fail("distance from the cladding interface must be > 0");
  } else if (d.z_nm) {
    const double t = s.layers[d.host_layer - 1].thickness_nm;
    if (!(*d.z_nm > 0.0 && *d.z_nm < t))
      n["z_nm"].fail("must lie strictly inside the host layer (0, " + Node::format(t) + ")");
  }
}

Side parse_side(const Node& n) {
  const std::string s = n.string();
  if (s == "up") return Side::up;
  if (s == "down") return Side::down;
  n.fail("expected \"up\" or \"down\"");
}

const json* find_path(const json& root, std::string_view path);

void check_sweep_paths(const SweepConfig& sweep, const json& canonical, const Node& n) {
  for (std::size_t i = 0; i < sweep.parameters.size(); ++i) {
    const auto& p = sweep.parameters[i].path;
    const Node pn = n["parameters"].at(i)["path"];
    if (p.rfind("sweep", 0) == 0 || p.rfind("output", 0) == 0)
      pn.fail("sweep and output settings cannot be swept");
    const json* target = find_path(canonical, p);
    if (target == nullptr) pn.fail("path '" + p + "' does not resolve in the config");
    if (!target->is_number()) pn.fail("path '" + p + "' does not name a number");
  }
}

SweepConfig parse_sweep(const Node& n) {
  n.require_object({"parameters", "objective", "wavelength_nm", "band", "cap"});
  SweepConfig s;
  const Node params = n["parameters"];
  if (!params.raw().is_array() || params.raw().empty()) params.fail("expected a non-empty array");
  for (std::size_t i = 0; i < params.raw().size(); ++i) {
    const Node p = params.at(i);
    p.require_object({"path", "min", "max", "n_points", "scale"});
    SweepAxis a;
    a.path = p["path"].string();
    a.min = p["min"].number();
    a.max = p.has("max") ? p["max"].number() : a.min;
    a.n_points = p.has("n_points") ? p["n_points"].count() : 1;
    if (a.n_points < 1) p["n_points"].fail("must be >= 1");
    if (a.n_points > 1 && !(a.max > a.min)) p["max"].fail("must exceed min");
    if (p.has("scale") && p["scale"].string() != "linear") p["scale"].fail("only \"linear\" is supported");
    s.parameters.push_back(a);
  }
  if (n.has("objective")) {
    try {
      s.objective = objective_from_string(n["objective"].string());
    } catch (const Error& e) {
      n["objective"].fail(e.what());
    }
  }
  if (n.has("wavelength_nm")) s.wavelength_nm = n["wavelength_nm"].positive();
  if (n.has("band")) s.band = parse_band(n["band"]);
  if (s.wavelength_nm && s.band) n.fail("give either wavelength_nm or band, not both");
  s.cap = n.has("cap") ? n["cap"].count() : kDefaultGridCap;
  if (s.cap < 1) n["cap"].fail("must be >= 1");
  SweepSpec spec{s.parameters, s.objective, s.cap};
  try {
    (void)spec.grid_size();
  } catch (const Error& e) {
    n.fail(e.what());
  }
  return s;
}

json sweep_json(const SweepConfig& s) {
  json params = json::array();
  for (const auto& a : s.parameters)
    params.push_back({{"path", a.path}, {"min", a.min}, {"max", a.max}, {"n_points", a.n_points},
                      {"scale", "linear"}});
  json j{{"parameters", params}, {"objective", std::string(to_string(s.objective))}, {"cap", s.cap}};
  if (s.wavelength_nm) j["wavelength_nm"] = *s.wavelength_nm;
  if (s.band) j["band"] = band_json(*s.band);
  return j;
}

// Splits "a.b[2].c" into keys and indices.
struct Step {
  std::string key;
  std::optional<std::size_t> index;
};

std::optional<std::vector<Step>> split_path(std::string_view path) {
  std::vector<Step> steps;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t end = path.find_first_of(".[", i);
    if (end == std::string_view::npos) end = path.size();
    if (end > i) steps.push_back({std::string(path.substr(i, end - i)), std::nullopt});
    i = end;
    if (i < path.size() && path[i] == '[') {
      const std::size_t close = path.find(']', i);
      if (close == std::string_view::npos) return std::nullopt;
      std::size_t idx = 0;
      const auto digits = path.substr(i + 1, close - i - 1);
      if (digits.empty()) return std::nullopt;
      for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        idx = idx * 10 + static_cast<std::size_t>(c - '0');
      }
      steps.push_back({"", idx});
      i = close + 1;
    }
    if (i < path.size() && path[i] == '.') ++i;
  }
  if (steps.empty()) return std::nullopt;
  return steps;
}

template <class J>
J* walk(J& root, std::string_view path) {
  const auto steps = split_path(path);
  if (!steps) return nullptr;
  J* cur = &root;
  for (const auto& s : *steps) {
    if (s.index) {
      if (!cur->is_array() || *s.index >= cur->size()) return nullptr;
      cur = &(*cur)[*s.index];
    } else {
      if (!cur->is_object() || !cur->contains(s.key)) return nullptr;
      cur = &(*cur)[s.key];
    }
  }
  return cur;
}

const json* find_path(const json& root, std::string_view path) { return walk(root, path); }

RunConfig parse_json(const json& root, const std::filesystem::path& base_dir) {
  const Node top(root, "");
  top.require_object({"materials", "stack", "dipole", "collection", "spectrum", "farfield", "emt",
                      "validate", "sweep", "output"});
  RunConfig c;
  c.base_dir = base_dir;

  if (top.has("materials")) {
    const Node m = top["materials"];
    if (!m.raw().is_object()) m.fail("expected an object of name -> material");
    for (const auto& [name, value] : m.raw().items())
      c.materials.emplace_back(name, parse_material(m[name], base_dir));
    std::sort(c.materials.begin(), c.materials.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  std::optional<PresetDefaults> defaults;
  if (top.has("stack")) {
    auto [stack, d] = parse_stack(top["stack"]);
    c.stack = std::move(stack);
    defaults = d;
  }
  if (top.has("dipole")) {
    if (!c.stack) top["dipole"].fail("a dipole needs a stack");
    c.dipole = parse_dipole(top["dipole"], defaults);
    check_dipole_geometry(*c.dipole, *c.stack, top["dipole"]);
  }

  if (top.has("collection")) {
    const Node n = top["collection"];
    n.require_object({"na", "side"});
    if (n.has("na")) c.collection.na = n["na"].positive();
    if (n.has("side")) c.collection.side = parse_side(n["side"]);
  }
  if (top.has("spectrum")) {
    const Node n = top["spectrum"];
    n.require_object({"s_min", "s_max", "n_points"});
    if (n.has("s_min")) c.spectrum.s_min = n["s_min"].number();
    if (n.has("s_max")) c.spectrum.s_max = n["s_max"].positive();
    if (n.has("n_points")) c.spectrum.n_points = n["n_points"].count();
    if (c.spectrum.s_min < 0.0) n["s_min"].fail("must be >= 0");
    if (!(c.spectrum.s_max > c.spectrum.s_min)) n["s_max"].fail("must exceed s_min");
    if (c.spectrum.n_points < 2) n["n_points"].fail("must be >= 2");
  }
  if (top.has("farfield")) {
    const Node n = top["farfield"];
    n.require_object({"n_theta"});
    if (n.has("n_theta")) c.farfield.n_theta = n["n_theta"].count();
    if (c.farfield.n_theta < 2) n["n_theta"].fail("must be >= 2");
  }
  if (top.has("emt")) {
    const Node n = top["emt"];
    n.require_object({"metal", "dielectric", "d_m_nm", "d_d_nm", "band"});
    if (n.has("metal")) c.emt.metal = n["metal"].string();
    if (n.has("dielectric")) c.emt.dielectric = n["dielectric"].string();
    if (n.has("d_m_nm")) c.emt.d_m_nm = n["d_m_nm"].number();
    if (n.has("d_d_nm")) c.emt.d_d_nm = n["d_d_nm"].number();
    if (c.emt.d_m_nm < 0.0) n["d_m_nm"].fail("must be >= 0");
    if (c.emt.d_d_nm < 0.0) n["d_d_nm"].fail("must be >= 0");
    if (!(c.emt.d_m_nm + c.emt.d_d_nm > 0.0)) n.fail("d_m_nm and d_d_nm cannot both be zero");
    if (n.has("band")) c.emt.band = parse_band(n["band"]);
    if (c.emt.band.n_points < 2) n["band"]["n_points"].fail("must be >= 2");
  }
  c.validate.gaps_nm = default_validation_gaps();
  if (top.has("validate")) {
    const Node n = top["validate"];
    n.require_object({"metal", "wavelength_nm", "gaps_nm", "tolerance"});
    if (n.has("metal")) c.validate.metal = n["metal"].string();
    if (n.has("wavelength_nm")) c.validate.wavelength_nm = n["wavelength_nm"].positive();
    if (n.has("tolerance")) c.validate.tolerance = n["tolerance"].positive();
    if (n.has("gaps_nm")) {
      const Node g = n["gaps_nm"];
      if (!g.raw().is_array() || g.raw().empty()) g.fail("expected a non-empty array");
      c.validate.gaps_nm.clear();
      for (std::size_t i = 0; i < g.raw().size(); ++i) c.validate.gaps_nm.push_back(g.at(i).positive());
    }
  }
  if (top.has("output")) {
    const Node n = top["output"];
    n.require_object({"directory", "format"});
    if (n.has("directory")) c.output.directory = n["directory"].string();
    if (n.has("format")) {
      c.output.format = n["format"].string();
      if (c.output.format != "csv" && c.output.format != "json") n["format"].fail("expected csv or json");
    }
  }

  // Every material name must resolve.
  const MaterialLibrary lib = material_library(c);
  auto check_name = [&](const std::string& name, const std::string& path) {
    if (!lib.contains(name)) {
      std::string known;
      for (const auto& k : lib.known_names()) known += (known.empty() ? "" : ", ") + k;
      throw ConfigError(path, "unknown material '" + name + "'; known materials: " + known);
    }
  };
  if (c.stack) {
    check_name(c.stack->lower, "stack.lower");
    check_name(c.stack->upper, "stack.upper");
    for (std::size_t i = 0; i < c.stack->layers.size(); ++i)
      check_name(c.stack->layers[i].material, "stack.layers[" + std::to_string(i) + "].material");
  }
  if (top.has("emt")) {
    check_name(c.emt.metal, "emt.metal");
    check_name(c.emt.dielectric, "emt.dielectric");
  }
  if (top.has("validate")) check_name(c.validate.metal, "validate.metal");

  if (top.has("sweep")) {
    c.sweep = parse_sweep(top["sweep"]);
    if (!c.stack || !c.dipole) top["sweep"].fail("a sweep needs a stack and a dipole");
    check_sweep_paths(*c.sweep, to_json(c), top["sweep"]);
  }
  return c;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.materials == b.materials && a.stack == b.stack && a.dipole == b.dipole &&
         a.collection == b.collection && a.spectrum == b.spectrum && a.farfield == b.farfield &&
         a.emt == b.emt && a.validate == b.validate && a.sweep == b.sweep && a.output == b.output;
}

std::vector<double> default_validation_gaps() {
  std::vector<double> g;
  for (int d = 2; d <= 10; ++d) g.push_back(d);
  for (int d = 15; d <= 50; d += 5) g.push_back(d);
  return g;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_json(root, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  json materials = json::object();
  for (const auto& [name, m] : c.materials) materials[name] = material_json(m);
  j["materials"] = materials;
  if (c.stack) j["stack"] = stack_json(*c.stack);
  if (c.dipole) j["dipole"] = dipole_json(*c.dipole);
  j["collection"] = {{"na", c.collection.na}, {"side", c.collection.side == Side::up ? "up" : "down"}};
  j["spectrum"] = {{"s_min", c.spectrum.s_min}, {"s_max", c.spectrum.s_max}, {"n_points", c.spectrum.n_points}};
  j["farfield"] = {{"n_theta", c.farfield.n_theta}};
  j["emt"] = {{"metal", c.emt.metal}, {"dielectric", c.emt.dielectric}, {"d_m_nm", c.emt.d_m_nm},
              {"d_d_nm", c.emt.d_d_nm}, {"band", band_json(c.emt.band)}};
  j["validate"] = {{"metal", c.validate.metal}, {"wavelength_nm", c.validate.wavelength_nm},
                   {"gaps_nm", c.validate.gaps_nm}, {"tolerance", c.validate.tolerance}};
  if (c.sweep) j["sweep"] = sweep_json(*c.sweep);
  j["output"] = {{"directory", c.output.directory}, {"format", c.output.format}};
  return j;
}

std::string canonical_json(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

MaterialLibrary material_library(const RunConfig& c) {
  MaterialLibrary lib = MaterialLibrary::from_environment();
  for (const auto& [name, spec] : c.materials) {
    try {
      lib.add(make_material(name, spec, c.base_dir));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("materials." + name, e.what());
    }
  }
  return lib;
}

LayerStack build_stack(const RunConfig& c, const MaterialLibrary& lib) {
  if (!c.stack) throw ConfigError("stack", "this command needs a stack");
  auto get = [&](const std::string& name, const std::string& path) {
    try {
      return lib.get(name);
    } catch (const Error& e) {
      throw ConfigError(path, e.what());
    }
  };
  std::vector<Layer> layers;
  for (std::size_t i = 0; i < c.stack->layers.size(); ++i) {
    const auto& l = c.stack->layers[i];
    layers.push_back({get(l.material, "stack.layers[" + std::to_string(i) + "].material"), l.thickness_nm});
  }
  try {
    return LayerStack(get(c.stack->lower, "stack.lower"), std::move(layers),
                      get(c.stack->upper, "stack.upper"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("stack", e.what());
  }
}

RunConfig with_parameter(const RunConfig& c, std::string_view path, double value) {
  json j = to_json(c);
  json* target = walk(j, path);
  if (target == nullptr || !target->is_number())
    throw ConfigError(std::string(path), "sweep path does not name a number in the config");
  if (target->is_number_integer() || target->is_number_unsigned()) {
    if (value != std::floor(value) || value < 0.0)
      throw ConfigError(std::string(path), "expects a non-negative integer, got " + Node::format(value));
    *target = static_cast<std::uint64_t>(value);
  } else {
    *target = value;
  }
  return parse_json(j, c.base_dir);
}

}  // namespace hmm::app
