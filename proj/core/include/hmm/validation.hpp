#pragma once

#include <span>
#include <vector>

#include "hmm/emission.hpp"

namespace hmm {

/// Quasi-static image-dipole estimate for a perpendicular dipole at height d
/// above a flat half-space of permittivity `eps_metal`, embedded in a lossless
/// host. Rates are normalized to vacuum.
struct QuasiStaticRate {
  double total = 0.0;         // radiative interference plus near-field loss
  double nonradiative = 0.0;  // the 1/d^3 absorption term alone
};
QuasiStaticRate quasi_static_perp(complex eps_metal, double eps_host, double wavelength_nm,
                                  double gap_nm);

/// Contribution of the bound surface-plasmon pole of a single interface to
/// the perpendicular rate, from its residue (vacuum-normalized).
double plasmon_pole_rate(complex eps_metal, double eps_host, double wavelength_nm, double gap_nm);

struct DrexhagePoint {
  double gap_nm = 0.0;
  double gamma_perp = 0.0;
  double radiative = 0.0;     // propagating window s < 1
  double plasmon = 0.0;
  double nonradiative = 0.0;  // gamma_perp - radiative - plasmon
  double oracle_total = 0.0;
  double oracle_nonradiative = 0.0;
};

/// Perpendicular dipole in air above semi-infinite `metal`.
std::vector<DrexhagePoint> drexhage_curve(const Material& metal, double wavelength_nm,
                                          std::span<const double> gaps_nm,
                                          const EmissionOptions& opt = {}, std::size_t threads = 1);

}  // namespace hmm
