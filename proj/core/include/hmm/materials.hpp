#pragma once

#include <complex>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hmm {

using complex = std::complex<double>;

/// Photon energy (eV) times vacuum wavelength (nm).
inline constexpr double kHcEvNm = 1239.84193;

/// Relative permittivity at one vacuum wavelength. Im(eps) >= 0 (passive).
struct ComplexPermittivity {
  complex eps{1.0, 0.0};
  double wavelength_nm = 0.0;
};

struct WavelengthBand {
  double min_nm = 0.0;
  double max_nm = 0.0;

  bool contains(double wavelength_nm) const {
    return wavelength_nm >= min_nm && wavelength_nm <= max_nm;
  }
  friend bool operator==(const WavelengthBand&, const WavelengthBand&) = default;
};

struct NkSample {
  double wavelength_nm;
  double n;
  double k;
  friend bool operator==(const NkSample&, const NkSample&) = default;
};

namespace model {

struct ConstantIndex {
  double n = 1.0;
  double k = 0.0;
  friend bool operator==(const ConstantIndex&, const ConstantIndex&) = default;
};

// eps = 1 + sum_i B_i L^2 / (L^2 - C_i), L in micrometres.
struct Sellmeier {
  std::vector<double> b;
  std::vector<double> c_um2;
  friend bool operator==(const Sellmeier&, const Sellmeier&) = default;
};

struct LorentzOscillator {
  double strength = 0.0;
  double resonance_ev = 0.0;
  double width_ev = 0.0;
  friend bool operator==(const LorentzOscillator&, const LorentzOscillator&) = default;
};

// eps = eps_inf - wp^2 / (w^2 + i g w) + sum_j f_j w_j^2 / (w_j^2 - w^2 - i G_j w)
struct DrudeLorentz {
  double eps_inf = 1.0;
  double plasma_ev = 0.0;
  double damping_ev = 0.0;
  std::vector<LorentzOscillator> oscillators;
  friend bool operator==(const DrudeLorentz&, const DrudeLorentz&) = default;
};

// n and k are interpolated linearly (and separately) in wavelength.
struct Tabulated {
  std::vector<NkSample> samples;
  friend bool operator==(const Tabulated&, const Tabulated&) = default;
};

// Ideal mirror: r_s = -1, r_p = +1 at every angle. Only valid as a cladding.
struct PerfectConductor {
  friend bool operator==(const PerfectConductor&, const PerfectConductor&) = default;
};

}  // namespace model

using MaterialModel = std::variant<model::ConstantIndex, model::Sellmeier, model::DrudeLorentz,
                                   model::Tabulated, model::PerfectConductor>;

/// A named, isotropic, non-magnetic optical material. Immutable.
class Material {
 public:
  static Material constant_index(std::string name, double n, double k = 0.0,
                                 WavelengthBand band = {1.0, 1.0e6});
  static Material sellmeier(std::string name, std::vector<double> b, std::vector<double> c_um2,
                            WavelengthBand band);
  static Material drude_lorentz(std::string name, model::DrudeLorentz params, WavelengthBand band);
  /// Samples must be strictly increasing in wavelength, at least two, with k >= 0.
  static Material tabulated(std::string name, std::vector<NkSample> samples);
  static Material perfect_conductor(std::string name);

  const std::string& name() const { return name_; }
  const WavelengthBand& band() const { return band_; }
  const MaterialModel& model() const { return model_; }
  bool is_perfect_conductor() const {
    return std::holds_alternative<model::PerfectConductor>(model_);
  }

  /// eps = (n + ik)^2. Throws RangeError outside band(); DomainError for a
  /// perfect conductor, which has no finite permittivity.
  ComplexPermittivity permittivity(double wavelength_nm) const;

  friend bool operator==(const Material&, const Material&) = default;

 private:
  Material(std::string name, WavelengthBand band, MaterialModel model);

  std::string name_;
  WavelengthBand band_;
  MaterialModel model_;
};

/// Reads the `wavelength_nm,n,k` CSV format. `source` names the input in errors.
Material parse_nk_table(std::istream& in, std::string name, std::string_view source = "<stream>");
/// Material name is the file stem.
Material ingest_nk_table(const std::filesystem::path& path);

/// Measured gold optical constants shipped with the library (397-1216 nm).
const std::vector<NkSample>& gold_nk_samples();

/// Names of every built-in material, sorted.
std::vector<std::string> builtin_material_names();
/// Throws DomainError listing the known names when `name` is not built in.
const Material& builtin_material(std::string_view name);

/// Built-ins plus user materials. Lookup order: user-registered, built-in,
/// then `<search_dir>/<name>.csv`.
class MaterialLibrary {
 public:
  MaterialLibrary() = default;
  explicit MaterialLibrary(std::optional<std::filesystem::path> search_dir)
      : search_dir_(std::move(search_dir)) {}

  /// Search directory taken from STRATA_MATERIALS_DIR when set.
  static MaterialLibrary from_environment();

  void add(Material material);
  bool contains(std::string_view name) const;
  Material get(std::string_view name) const;
  std::vector<std::string> known_names() const;
  const std::optional<std::filesystem::path>& search_dir() const { return search_dir_; }

 private:
  std::optional<std::filesystem::path> search_dir_;
  std::map<std::string, Material, std::less<>> user_;
};

}  // namespace hmm
