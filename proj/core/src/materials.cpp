#include "hmm/materials.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "hmm/errors.hpp"

namespace hmm {

namespace {

std::string describe_band(const WavelengthBand& band) {
  std::ostringstream os;
  os << "[" << band.min_nm << ", " << band.max_nm << "] nm";
  return os.str();
}

void check_passive(const std::string& name, complex eps, double wavelength_nm) {
  if (!std::isfinite(eps.real()) || !std::isfinite(eps.imag())) {
    std::ostringstream os;
    os << "material '" << name << "' has non-finite permittivity at " << wavelength_nm << " nm";
    throw DomainError(os.str());
  }
  if (eps.imag() < 0.0) {
    std::ostringstream os;
    os << "material '" << name << "' is not passive at " << wavelength_nm
       << " nm (Im eps = " << eps.imag() << ")";
    throw DomainError(os.str());
  }
}

struct PermittivityVisitor {
  double wavelength_nm;

  complex operator()(const model::ConstantIndex& m) const {
    const complex n{m.n, m.k};
    return n * n;
  }

  complex operator()(const model::Sellmeier& m) const {
    const double l2 = (wavelength_nm * 1e-3) * (wavelength_nm * 1e-3);
    double eps = 1.0;
    for (std::size_t i = 0; i < m.b.size(); ++i) eps += m.b[i] * l2 / (l2 - m.c_um2[i]);
    return {eps, 0.0};
  }

  complex operator()(const model::DrudeLorentz& m) const {
    const double w = kHcEvNm / wavelength_nm;
    complex eps = m.eps_inf - m.plasma_ev * m.plasma_ev / complex(w * w, m.damping_ev * w);
    for (const auto& osc : m.oscillators) {
      const double w0 = osc.resonance_ev;
      eps += osc.strength * w0 * w0 / complex(w0 * w0 - w * w, -osc.width_ev * w);
    }
    return eps;
  }

  complex operator()(const model::Tabulated& m) const {
    const auto& s = m.samples;
    if (wavelength_nm == s.back().wavelength_nm) {
      const complex n{s.back().n, s.back().k};
      return n * n;
    }
    auto hi = std::upper_bound(s.begin(), s.end(), wavelength_nm,
                               [](double w, const NkSample& x) { return w < x.wavelength_nm; });
    auto lo = std::prev(hi);
    const double t = (wavelength_nm - lo->wavelength_nm) / (hi->wavelength_nm - lo->wavelength_nm);
    const complex n{lo->n + (hi->n - lo->n) * t, lo->k + (hi->k - lo->k) * t};
    return n * n;
  }

  complex operator()(const model::PerfectConductor&) const {
    throw DomainError("a perfect conductor has no finite permittivity");
  }
};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

[[noreturn]] void fail_row(std::string_view source, std::size_t row, const std::string& what) {
  std::ostringstream os;
  os << source << ":" << row << ": " << what;
  throw ParseError(os.str(), row);
}

}  // namespace

Material::Material(std::string name, WavelengthBand band, MaterialModel model)
    : name_(std::move(name)), band_(band), model_(std::move(model)) {
  if (name_.empty()) throw DomainError("material name must not be empty");
  if (!(band_.min_nm > 0.0) || !(band_.max_nm >= band_.min_nm))
    throw DomainError("material '" + name_ + "' has an invalid band " + describe_band(band_));
}

Material Material::constant_index(std::string name, double n, double k, WavelengthBand band) {
  if (!std::isfinite(n) || !std::isfinite(k) || k < 0.0)
    throw DomainError("material '" + name + "' needs finite n and k >= 0");
  return Material(std::move(name), band, model::ConstantIndex{n, k});
}

Material Material::sellmeier(std::string name, std::vector<double> b, std::vector<double> c_um2,
                             WavelengthBand band) {
  if (b.size() != c_um2.size() || b.empty())
    throw DomainError("material '" + name + "' needs matching, non-empty Sellmeier B and C terms");
  return Material(std::move(name), band, model::Sellmeier{std::move(b), std::move(c_um2)});
}

Material Material::drude_lorentz(std::string name, model::DrudeLorentz params,
                                 WavelengthBand band) {
  if (params.damping_ev < 0.0) throw DomainError("material '" + name + "' has negative damping");
  for (const auto& osc : params.oscillators)
    if (osc.width_ev < 0.0 || osc.strength < 0.0)
      throw DomainError("material '" + name + "' has an active Lorentz oscillator");
  return Material(std::move(name), band, std::move(params));
}

Material Material::tabulated(std::string name, std::vector<NkSample> samples) {
  if (samples.size() < 2)
    throw DomainError("material '" + name + "' needs at least two tabulated samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].k < 0.0) throw DomainError("material '" + name + "' has negative k");
    if (i > 0 && !(samples[i].wavelength_nm > samples[i - 1].wavelength_nm))
      throw DomainError("material '" + name + "' samples are not strictly increasing");
  }
  WavelengthBand band{samples.front().wavelength_nm, samples.back().wavelength_nm};
  return Material(std::move(name), band, model::Tabulated{std::move(samples)});
}

Material Material::perfect_conductor(std::string name) {
  return Material(std::move(name), {1.0e-6, 1.0e12}, model::PerfectConductor{});
}

ComplexPermittivity Material::permittivity(double wavelength_nm) const {
  if (!band_.contains(wavelength_nm)) {
    std::ostringstream os;
    os << "wavelength " << wavelength_nm << " nm is outside the band of material '" << name_
       << "' " << describe_band(band_);
    throw RangeError(os.str());
  }
  const complex eps = std::visit(PermittivityVisitor{wavelength_nm}, model_);
  check_passive(name_, eps, wavelength_nm);
  return {eps, wavelength_nm};
}

Material parse_nk_table(std::istream& in, std::string name, std::string_view source) {
  std::vector<NkSample> samples;
  bool header_seen = false;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view text = trim(line);
    if (row == 1 && text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : text)
        if (c != ' ' && c != '\t') compact.push_back(c);
      if (compact != "wavelength_nm,n,k") fail_row(source, row, "expected header 'wavelength_nm,n,k'");
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      fields.push_back(text.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 3) fail_row(source, row, "expected 3 comma-separated fields");
    NkSample s{};
    if (!parse_double(fields[0], s.wavelength_nm) || !parse_double(fields[1], s.n) ||
        !parse_double(fields[2], s.k))
      fail_row(source, row, "malformed number");
    if (!(s.wavelength_nm > 0.0)) fail_row(source, row, "wavelength must be positive");
    if (s.k < 0.0) fail_row(source, row, "negative extinction coefficient k");
    if (!samples.empty() && !(s.wavelength_nm > samples.back().wavelength_nm))
      fail_row(source, row, "wavelengths must be strictly increasing");
    samples.push_back(s);
  }
  if (!header_seen) fail_row(source, row, "missing header 'wavelength_nm,n,k'");
  if (samples.size() < 2) fail_row(source, row, "at least two data rows are required");
  return Material::tabulated(std::move(name), std::move(samples));
}

Material ingest_nk_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open material table " + path.string(), 0);
  return parse_nk_table(in, path.stem().string(), path.string());
}

const std::vector<NkSample>& gold_nk_samples() {
  // Same rows as core/data/materials/au.csv.
  static const std::vector<NkSample> samples = {
      {397.3852, 1.47, 1.952}, {413.2806, 1.46, 1.958}, {430.5007, 1.45, 1.948},
      {450.8516, 1.38, 1.914}, {471.4228, 1.31, 1.849}, {495.9368, 1.04, 1.833},
      {520.9420, 0.62, 2.081}, {548.6026, 0.43, 2.455}, {582.0854, 0.29, 2.863},
      {616.8368, 0.21, 3.272}, {659.4904, 0.14, 3.697}, {704.4556, 0.13, 4.103},
      {756.0012, 0.14, 4.542}, {821.0874, 0.16, 5.083}, {891.9726, 0.17, 5.663},
      {984.0015, 0.22, 6.35},  {1087.5806, 0.27, 7.15}, {1215.5313, 0.35, 8.145},
  };
  return samples;
}

namespace {

const std::map<std::string, Material, std::less<>>& builtin_table() {
  static const std::map<std::string, Material, std::less<>> table = [] {
    std::map<std::string, Material, std::less<>> t;
    auto put = [&t](Material m) { t.emplace(m.name(), std::move(m)); };
    const WavelengthBand dielectric_band{200.0, 2500.0};
    put(Material::constant_index("vacuum", 1.0));
    put(Material::constant_index("air", 1.0));
    put(Material::constant_index("glass", 1.45, 0.0, dielectric_band));
    put(Material::constant_index("pva", 1.47, 0.0, dielectric_band));
    put(Material::constant_index("zns", 2.30, 0.0, dielectric_band));
    put(Material::constant_index("sic", 2.59, 0.0, dielectric_band));
    put(Material::constant_index("diamond", 2.39, 0.0, dielectric_band));
    // Fused silica, three-term Sellmeier fit.
    put(Material::sellmeier("silica", {0.6961663, 0.4079426, 0.8974794},
                            {0.0684043 * 0.0684043, 0.1162414 * 0.1162414, 9.896161 * 9.896161},
                            {210.0, 3710.0}));
    put(Material::tabulated("au", gold_nk_samples()));
    // Free-electron gold for sensitivity studies; interband absorption is absent.
    put(Material::drude_lorentz("au-drude", {1.0, 9.03, 0.053, {}}, {300.0, 2000.0}));
    put(Material::perfect_conductor("pec"));
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string> builtin_material_names() {
  std::vector<std::string> names;
  for (const auto& [name, m] : builtin_table()) names.push_back(name);
  return names;
}

const Material& builtin_material(std::string_view name) {
  const auto& t = builtin_table();
  if (auto it = t.find(name); it != t.end()) return it->second;
  std::string known;
  for (const auto& n : builtin_material_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown material '" + std::string(name) + "'; known materials: " + known);
}

MaterialLibrary MaterialLibrary::from_environment() {
  if (const char* dir = std::getenv("STRATA_MATERIALS_DIR"); dir != nullptr && *dir != '\0')
    return MaterialLibrary(std::filesystem::path(dir));
  return MaterialLibrary();
}

void MaterialLibrary::add(Material material) {
  const std::string key = material.name();
  user_.insert_or_assign(key, std::move(material));
}

bool MaterialLibrary::contains(std::string_view name) const {
  if (user_.count(name) != 0 || builtin_table().count(name) != 0) return true;
  return search_dir_ && std::filesystem::is_regular_file(*search_dir_ / (std::string(name) + ".csv"));
}

Material MaterialLibrary::get(std::string_view name) const {
  if (auto it = user_.find(name); it != user_.end()) return it->second;
  if (auto it = builtin_table().find(name); it != builtin_table().end()) return it->second;
  if (search_dir_) {
    const auto path = *search_dir_ / (std::string(name) + ".csv");
    if (std::filesystem::is_regular_file(path)) return ingest_nk_table(path);
  }
  std::string known;
  for (const auto& n : known_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown material '" + std::string(name) + "'; known materials: " + known);
}

std::vector<std::string> MaterialLibrary::known_names() const {
  std::vector<std::string> names = builtin_material_names();
  for (const auto& [name, m] : user_) names.push_back(name);
  if (search_dir_ && std::filesystem::is_directory(*search_dir_)) {
    for (const auto& entry : std::filesystem::directory_iterator(*search_dir_))
      if (entry.path().extension() == ".csv") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace hmm
