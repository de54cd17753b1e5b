#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hmm/quadrature.hpp"
#include "hmm/stack.hpp"

namespace hmm {

/// Point electric dipole inside a stack.
///
/// `z_nm` is measured from the bottom of a finite host layer. In a cladding it
/// is the distance to the cladding's interface. `theta_deg` is the angle to the
/// stack normal: 0 is a perpendicular (vertical) dipole, 90 a parallel one.
struct DipoleSource {
  double wavelength_nm = 0.0;
  std::size_t host_layer = 0;
  double z_nm = 0.0;
  double theta_deg = 0.0;
};

/// cos^2 and sin^2 of the dipole tilt, formed so that 45 degrees gives exactly 1/2.
std::array<double, 2> orientation_weights(double theta_deg);

struct SpectrumSample {
  double s = 0.0;       // k_par / k_host
  double k_perp = 0.0;  // dP/ds over the power of the same dipole in the bulk host
  double k_par = 0.0;
};

struct DissipationSpectrum {
  std::vector<SpectrumSample> samples;
};

/// Uniform sampling of s. A node that lands exactly on s = 1 (where the
/// kernels have an integrable singularity) is moved to 1 - 1e-9.
struct SGrid {
  double s_min = 0.0;
  double s_max = 10.0;
  std::size_t n_points = 1001;
};

/// Rates normalized to the same dipole in vacuum.
struct DecayRates {
  double gamma_perp = 0.0;
  double gamma_par = 0.0;
  double gamma_theta = 0.0;
  double theta_deg = 0.0;
  double err_perp = 0.0;
  double err_par = 0.0;
  double err_estimate = 0.0;  // for gamma_theta, quadrature plus truncated tail
  double s_max = 0.0;         // where the evanescent integral was truncated
  std::size_t evaluations = 0;
};

struct EmissionOptions {
  QuadratureOptions quadrature{1e-6, 1e-13, 4000};
  double tail_tol = 1e-9;  // truncated tail relative to the accumulated integral
  double s_floor = 10.0;
  double s_ceiling = 1000.0;
};

/// Per-polarization cavity quantities at one in-plane wavevector:
/// a = r_up exp(2 i kz d_up), b = r_down exp(2 i kz d_down).
struct CavityState {
  complex a_s, b_s, a_p, b_p;
  HalfSpaceResponse up, down;
  complex cz;       // sqrt(1 - s^2), Im >= 0
  double s = 0.0;
};

/// A dipole placed in a stack resolved at its wavelength. Holds everything the
/// Sommerfeld integrands need; immutable and cheap to share across threads.
class EmissionGeometry {
 public:
  EmissionGeometry(const LayerStack& stack, const DipoleSource& dipole);
  EmissionGeometry(ResolvedStack stack, std::size_t host_layer, double z_nm);

  const ResolvedStack& stack() const { return stack_; }
  std::size_t host() const { return host_; }
  double n_host() const { return n_host_; }
  double k_host() const { return n_host_ * stack_.k0; }
  /// Distances to the host's upper and lower boundary; infinite outward of a cladding.
  double d_up() const { return d_up_; }
  double d_down() const { return d_down_; }
  double d_min() const;

  TransverseState state(complex cz) const { return {stack_.media[host_].eps, cz}; }
  CavityState cavity(double s, complex cz) const;

  /// s^3 F_p and s (F_s + cz^2 F_pp): the kernels are K = (3/2, 3/4) Re{G / cz}.
  std::array<complex, 2> kernel_numerators(const CavityState& c) const;
  /// K_perp and K_par at real s (s = 1 is not allowed).
  std::array<double, 2> kernels(double s) const;

 private:
  void validate_host(double z_nm);

  ResolvedStack stack_;
  std::size_t host_;
  double n_host_ = 1.0;
  double d_up_ = 0.0;
  double d_down_ = 0.0;
};

DissipationSpectrum dissipation_spectrum(const LayerStack& stack, const DipoleSource& dipole,
                                         const SGrid& grid);

/// Integral of (K_perp, K_par) over [s_lo, s_hi], both finite; the result is
/// in host-bulk units (multiply by n_host for vacuum units).
QuadratureResult<2> integrate_kernels(const EmissionGeometry& geom, double s_lo, double s_hi,
                                      const QuadratureOptions& opt = {});

DecayRates purcell(const EmissionGeometry& geom, double theta_deg, const EmissionOptions& opt = {});
DecayRates purcell(const LayerStack& stack, const DipoleSource& dipole,
                   const EmissionOptions& opt = {});

/// Where a reference dipole sits: its own stack, host and position.
struct ReferenceSite {
  LayerStack stack;
  std::size_t host_layer = 0;
  double z_nm = 0.0;
};

/// Glass lower cladding, air upper cladding, dipole in air 20 nm above the glass.
ReferenceSite coverslip_reference();

/// gamma_theta in `stack` over gamma_theta of the same dipole (wavelength and
/// orientation) placed at the reference site.
double relative_rate(const LayerStack& stack, const DipoleSource& dipole,
                     const ReferenceSite& reference, const EmissionOptions& opt = {});

struct PositionRates {
  double offset_nm = 0.0;
  DecayRates rates;
};

/// Rates with the dipole displaced along z by each offset. In-plane
/// displacements leave a planar stack unchanged, so only z is swept.
std::vector<PositionRates> position_sweep(const LayerStack& stack, const DipoleSource& dipole,
                                          std::span<const double> offsets_nm,
                                          const EmissionOptions& opt = {}, std::size_t threads = 1);

}  // namespace hmm
