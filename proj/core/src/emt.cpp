#include "hmm/emt.hpp"

#include <cmath>

#include "hmm/errors.hpp"

namespace hmm {

EffectivePermittivity effective_permittivity(const ComplexPermittivity& eps_m,
                                             const ComplexPermittivity& eps_d, double d_m_nm,
                                             double d_d_nm) {
  if (!(d_m_nm >= 0.0) || !(d_d_nm >= 0.0) || !std::isfinite(d_m_nm) || !std::isfinite(d_d_nm))
    throw DomainError("layer thicknesses must be finite and non-negative");
  const double total = d_m_nm + d_d_nm;
  if (!(total > 0.0)) throw DomainError("metal and dielectric thicknesses cannot both be zero");

  EffectivePermittivity out;
  out.wavelength_nm = eps_m.wavelength_nm;
  out.fill_fraction_metal = d_m_nm / total;
  if (d_m_nm == 0.0) {
    out.eps_perp = out.eps_par = eps_d.eps;
  } else if (d_d_nm == 0.0) {
    out.eps_perp = out.eps_par = eps_m.eps;
  } else {
    out.eps_perp = (eps_m.eps * d_m_nm + eps_d.eps * d_d_nm) / total;
    out.eps_par = total / (d_m_nm / eps_m.eps + d_d_nm / eps_d.eps);
  }
  return out;
}

std::vector<HyperbolicitySample> hyperbolicity_band(const Material& metal, const Material& dielectric,
                                                    double d_m_nm, double d_d_nm, double lambda_min_nm,
                                                    double lambda_max_nm, std::size_t n_points) {
  if (!(lambda_min_nm < lambda_max_nm)) throw DomainError("band needs lambda_min < lambda_max");
  if (n_points < 2) throw DomainError("band needs at least two points");
  std::vector<HyperbolicitySample> out;
  out.reserve(n_points);
  const double step = (lambda_max_nm - lambda_min_nm) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double lambda =
        i + 1 == n_points ? lambda_max_nm : lambda_min_nm + step * static_cast<double>(i);
    const auto eff = effective_permittivity(metal.permittivity(lambda), dielectric.permittivity(lambda),
                                            d_m_nm, d_d_nm);
    out.push_back({lambda, eff.eps_perp, eff.eps_par, eff.is_hyperbolic()});
  }
  return out;
}

IsoFrequencyPoint iso_frequency_k_perp(const EffectivePermittivity& eff, double k_par) {
  if (!std::isfinite(k_par)) throw DomainError("k_par must be finite");
  IsoFrequencyPoint out;
  out.k_par = k_par;
  complex kz = std::sqrt(eff.eps_perp * (1.0 - k_par * k_par / eff.eps_par));
  if (kz.imag() < 0.0 || (kz.imag() == 0.0 && kz.real() < 0.0)) kz = -kz;
  out.k_perp = kz;
  out.residual = std::abs(k_par * k_par / eff.eps_par + kz * kz / eff.eps_perp - 1.0);
  return out;
}

}  // namespace hmm
