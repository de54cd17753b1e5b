#pragma once

#include <vector>

#include "hmm/materials.hpp"

namespace hmm {

/// Uniaxial effective permittivity of a metal/dielectric superlattice.
/// eps_perp is the thickness-weighted arithmetic mean, eps_par the harmonic one.
struct EffectivePermittivity {
  complex eps_perp;
  complex eps_par;
  double wavelength_nm = 0.0;
  double fill_fraction_metal = 0.0;

  /// Re eps_perp and Re eps_par of opposite sign.
  bool is_hyperbolic() const { return eps_perp.real() * eps_par.real() < 0.0; }
};

EffectivePermittivity effective_permittivity(const ComplexPermittivity& eps_m,
                                             const ComplexPermittivity& eps_d, double d_m_nm,
                                             double d_d_nm);

struct HyperbolicitySample {
  double wavelength_nm = 0.0;
  complex eps_perp;
  complex eps_par;
  bool is_hyperbolic = false;
};

/// n_points samples, uniformly spaced and including both ends.
std::vector<HyperbolicitySample> hyperbolicity_band(const Material& metal, const Material& dielectric,
                                                    double d_m_nm, double d_d_nm, double lambda_min_nm,
                                                    double lambda_max_nm, std::size_t n_points);

/// k in units of omega/c.
struct IsoFrequencyPoint {
  double k_par = 0.0;
  complex k_perp;
  double residual = 0.0;  // |k_par^2/eps_par + k_perp^2/eps_perp - 1|
};

/// Solves k_par^2/eps_par + k_perp^2/eps_perp = 1 for k_perp with Im k_perp >= 0.
IsoFrequencyPoint iso_frequency_k_perp(const EffectivePermittivity& eff, double k_par);

}  // namespace hmm
