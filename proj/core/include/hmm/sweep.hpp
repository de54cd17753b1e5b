#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hmm {

/// One swept parameter. `path` is opaque to the harness; the evaluator decides
/// what it means.
struct SweepAxis {
  std::string path;
  double min = 0.0;
  double max = 0.0;
  std::size_t n_points = 1;

  /// Linear grid; a single point sits at `min`.
  std::vector<double> values() const;
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

enum class Objective { fp_perp, qe, ce_tot, cpr };
std::string_view to_string(Objective o);
Objective objective_from_string(std::string_view name);

struct Metrics {
  double fp_perp = 0.0;
  double qe = 0.0;
  double ce_tot = 0.0;
  double cpr = 0.0;

  double get(Objective o) const;
};

inline constexpr std::size_t kDefaultGridCap = 1'000'000;

struct SweepSpec {
  std::vector<SweepAxis> axes;
  Objective objective = Objective::fp_perp;
  std::size_t grid_cap = kDefaultGridCap;

  /// Product of the axis sizes. Throws DomainError above grid_cap.
  std::size_t grid_size() const;
};

struct SweepRow {
  std::vector<double> params;
  double objective = 0.0;
  Metrics metrics;
};

struct SweepResult {
  std::vector<std::string> paths;
  std::vector<SweepRow> rows;  // row-major, last axis fastest
  std::size_t argmax = 0;
};

using Evaluator = std::function<Metrics(std::span<const double> params)>;

/// Full-factorial evaluation. A failing point aborts the sweep with an error
/// of the same category whose message names the parameter tuple.
SweepResult run_sweep(const SweepSpec& spec, const Evaluator& evaluate, std::size_t threads = 1);

/// Highest objective; ties go to the lexicographically smallest tuple.
std::size_t argmax_row(std::span<const SweepRow> rows);

struct BandSample {
  double wavelength_nm = 0.0;
  double value = 0.0;
};

/// Trapezoidal mean of the samples falling inside [lambda_min, lambda_max].
double band_average(std::span<const BandSample> samples, double lambda_min_nm, double lambda_max_nm);

}  // namespace hmm
