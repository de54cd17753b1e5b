#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hmm/errors.hpp"
#include "hmm/materials.hpp"
#include "hmm/stack.hpp"
#include "hmm/sweep.hpp"

namespace hmm::app {

/// Invalid configuration. `path` is the offending JSON location, e.g.
/// `stack.layers[1].thickness_nm`.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(Category::config, path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Filesystem failure while writing results.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(Category::io, what) {}
};

struct Band {
  double min_nm = 0.0;
  double max_nm = 0.0;
  std::size_t n_points = 2;
  friend bool operator==(const Band&, const Band&) = default;
};

/// User material declared in the config.
struct MaterialSpec {
  enum class Kind { constant, drude, table };
  Kind kind = Kind::constant;
  double n = 1.0, k = 0.0;                                  // constant
  double eps_inf = 1.0, plasma_ev = 0.0, damping_ev = 0.0;  // drude
  std::string file;                                         // table, relative to the config
  std::optional<std::pair<double, double>> band_nm;
  friend bool operator==(const MaterialSpec&, const MaterialSpec&) = default;
};

struct LayerSpec {
  std::string material;
  double thickness_nm = 0.0;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct StackSpec {
  std::string lower;
  std::vector<LayerSpec> layers;
  std::string upper;
  friend bool operator==(const StackSpec&, const StackSpec&) = default;
};

struct DipoleSpec {
  std::optional<double> wavelength_nm;
  std::optional<Band> band;
  std::size_t host_layer = 0;
  std::optional<double> z_nm;
  std::optional<double> z_fraction;
  double theta_deg = 0.0;
  friend bool operator==(const DipoleSpec&, const DipoleSpec&) = default;
};

struct CollectionSpec {
  double na = 0.95;
  Side side = Side::up;
  friend bool operator==(const CollectionSpec&, const CollectionSpec&) = default;
};

struct SpectrumSpec {
  double s_min = 0.0;
  double s_max = 10.0;
  std::size_t n_points = 1001;
  friend bool operator==(const SpectrumSpec&, const SpectrumSpec&) = default;
};

struct FarfieldSpec {
  std::size_t n_theta = 361;
  friend bool operator==(const FarfieldSpec&, const FarfieldSpec&) = default;
};

struct EmtSpec {
  std::string metal = "au";
  std::string dielectric = "zns";
  double d_m_nm = 30.0;
  double d_d_nm = 30.0;
  Band band{650.0, 1000.0, 176};
  friend bool operator==(const EmtSpec&, const EmtSpec&) = default;
};

struct ValidateSpec {
  std::string metal = "au";
  double wavelength_nm = 650.0;
  std::vector<double> gaps_nm;
  double tolerance = 0.10;  // on the nonradiative term, 2-10 nm
  friend bool operator==(const ValidateSpec&, const ValidateSpec&) = default;
};

struct SweepConfig {
  std::vector<SweepAxis> parameters;
  Objective objective = Objective::fp_perp;
  std::optional<double> wavelength_nm;
  std::optional<Band> band;
  std::size_t cap = kDefaultGridCap;
  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct OutputSpec {
  std::string directory = ".";
  std::string format = "csv";
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  std::vector<std::pair<std::string, MaterialSpec>> materials;  // sorted by name
  std::optional<StackSpec> stack;
  std::optional<DipoleSpec> dipole;
  CollectionSpec collection;
  SpectrumSpec spectrum;
  FarfieldSpec farfield;
  EmtSpec emt;
  ValidateSpec validate;
  std::optional<SweepConfig> sweep;
  OutputSpec output;
  std::filesystem::path base_dir;  // resolves relative material files; not serialized

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

/// Default gap list of the validate subcommand: 2-10 nm in 1 nm steps, then to 50 nm in 5 nm steps.
std::vector<double> default_validation_gaps();

/// Parses and fully validates a JSON config. Files are resolved against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Sorted keys, presets expanded, every default written out.
nlohmann::json to_json(const RunConfig& config);
std::string canonical_json(const RunConfig& config);

/// Library with the config's materials registered on top of the built-ins and
/// STRATA_MATERIALS_DIR.
MaterialLibrary material_library(const RunConfig& config);
LayerStack build_stack(const RunConfig& config, const MaterialLibrary& lib);

/// Copy of `config` with the number at `path` (dotted keys, [i] indices) replaced.
RunConfig with_parameter(const RunConfig& config, std::string_view path, double value);

}  // namespace hmm::app
