#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hmm/emission.hpp"

namespace hmm {

struct AngularSample {
  double theta_deg = 0.0;  // from the outward normal of the cladding
  double p = 0.0;          // phi-integrated power per unit solid-angle polar element
};

/// Far-field power in one cladding. The integral of p(theta) sin(theta)
/// d(theta) (radians) is the power radiated into that cladding in units of
/// the vacuum decay rate.
struct AngularPattern {
  Side side = Side::up;
  double n_cladding = 1.0;
  std::vector<AngularSample> samples;
};

struct FarFieldOptions {
  std::size_t n_theta = 361;  // uniform nodes over [0, 90]; critical angles are added
  EmissionOptions emission{};
};

/// Thin wrapper around an EmissionGeometry with far-field quantities.
class FarField {
 public:
  FarField(const LayerStack& stack, const DipoleSource& dipole);
  FarField(EmissionGeometry geom, double theta_deg);

  const EmissionGeometry& geometry() const { return geom_; }
  double theta_deg() const { return theta_deg_; }
  /// Refractive index of the cladding on `side`; nullopt for a perfect conductor.
  std::optional<double> cladding_index(Side side) const;

  /// Power per unit s reaching the cladding on `side`, divided by s (finite at s = 0).
  double transmitted_density_over_s(Side side, double s) const;
  /// Outgoing z-flux per unit s just inside the host at its `side` boundary.
  double host_flux_density(Side side, double s) const;

  AngularPattern pattern(Side side, std::size_t n_theta = 361) const;
  /// Same, with additional theta nodes (degrees) in the grid.
  AngularPattern pattern(Side side, std::size_t n_theta, std::span<const double> extra_nodes_deg) const;
  /// Host-boundary flux integrated over the s range that propagates in the cladding.
  double outgoing_power_at_host(Side side, const QuadratureOptions& opt = {}) const;

 private:
  void require_lossless(Side side) const;
  double density_over_s(Side side, double s, complex cz) const;

  EmissionGeometry geom_;
  double theta_deg_ = 0.0;
  std::array<double, 2> weights_{1.0, 0.0};
};

AngularPattern angular_pattern(const LayerStack& stack, const DipoleSource& dipole, Side side,
                               std::size_t n_theta = 361);

/// Trapezoidal integral of p sin(theta) d(theta) up to theta_max_deg.
double radiated_power(const AngularPattern& pattern, double theta_max_deg = 90.0);

struct EnergyBudget {
  DecayRates rates;
  double radiated_up = 0.0;
  double radiated_down = 0.0;
  double qe = 0.0;
};

EnergyBudget energy_budget(const LayerStack& stack, const DipoleSource& dipole,
                           const FarFieldOptions& opt = {});
double quantum_efficiency(const LayerStack& stack, const DipoleSource& dipole,
                          const FarFieldOptions& opt = {});

struct CollectionResult {
  double wavelength_nm = 0.0;
  double fp = 0.0;          // gamma_theta
  double gamma_perp = 0.0;
  double qe = 0.0;
  double ce_rad = 0.0;
  double ce_tot = 0.0;
  double cpr = 0.0;
  double na = 0.0;
  double theta_max_deg = 0.0;
  Side side = Side::up;
};

CollectionResult collection(const LayerStack& stack, const DipoleSource& dipole, double na,
                            Side side = Side::up, const FarFieldOptions& opt = {});

/// One wavelength of a spectrum. A failed point keeps its wavelength and the
/// error text instead of a result.
struct CprPoint {
  double wavelength_nm = 0.0;
  std::optional<CollectionResult> result;
  std::string error;
};

std::vector<CprPoint> cpr_spectrum(const LayerStack& stack, const DipoleSource& dipole,
                                   double lambda_min_nm, double lambda_max_nm, std::size_t n,
                                   double na, Side side = Side::up, const FarFieldOptions& opt = {},
                                   std::size_t threads = 1);

/// n wavelengths spread uniformly over [lambda_min, lambda_max], ends included.
std::vector<double> wavelength_grid(double lambda_min_nm, double lambda_max_nm, std::size_t n);

}  // namespace hmm
