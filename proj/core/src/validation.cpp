#include "hmm/validation.hpp"

#include <cmath>
#include <numbers>

#include "hmm/errors.hpp"
#include "hmm/parallel.hpp"

namespace hmm {

namespace {

complex decaying(complex q) { return (q.imag() < 0.0 || (q.imag() == 0.0 && q.real() < 0.0)) ? -q : q; }

void check_gap(double eps_host, double gap_nm, double wavelength_nm) {
  if (!(eps_host > 0.0)) throw DomainError("host permittivity must be positive");
  if (!(gap_nm > 0.0) || !std::isfinite(gap_nm)) throw DomainError("gap must be positive");
  if (!(wavelength_nm > 0.0)) throw DomainError("wavelength must be positive");
}

}  // namespace

QuasiStaticRate quasi_static_perp(complex eps_metal, double eps_host, double wavelength_nm,
                                  double gap_nm) {
  check_gap(eps_host, gap_nm, wavelength_nm);
  const double n = std::sqrt(eps_host);
  const double k = 2.0 * std::numbers::pi * n / wavelength_nm;
  const complex beta = (eps_metal - eps_host) / (eps_metal + eps_host);
  const double x = 2.0 * k * gap_nm;
  const complex image = 2.0 * beta * std::exp(complex(0.0, x)) * complex(1.0, -x);
  QuasiStaticRate out;
  out.total = n * (1.0 + 1.5 * image.imag() / (x * x * x));
  out.nonradiative = n * 3.0 * beta.imag() / (8.0 * std::pow(k * gap_nm, 3));
  return out;
}

double plasmon_pole_rate(complex eps_metal, double eps_host, double wavelength_nm, double gap_nm) {
  check_gap(eps_host, gap_nm, wavelength_nm);
  const complex e1(eps_host, 0.0);
  const complex e2 = eps_metal;
  const complex sp = std::sqrt(e2 / (e1 + e2));
  const complex q1 = decaying(std::sqrt(1.0 - sp * sp));
  const complex q2 = decaying(std::sqrt(e2 / e1 - sp * sp));
  const complex numerator = e2 * q1 - e1 * q2;
  const complex slope = -sp * (e2 / q1 + e1 / q2);
  const complex residue = numerator / slope;
  const double n = std::sqrt(eps_host);
  const double k = 2.0 * std::numbers::pi * n / wavelength_nm;
  const complex i(0.0, 1.0);
  const complex term = i * std::numbers::pi * sp * sp * sp / q1 * residue *
                       std::exp(2.0 * i * k * q1 * gap_nm);
  return n * 1.5 * term.real();
}

std::vector<DrexhagePoint> drexhage_curve(const Material& metal, double wavelength_nm,
                                          std::span<const double> gaps_nm,
                                          const EmissionOptions& opt, std::size_t threads) {
  const LayerStack stack(metal, {}, builtin_material("air"));
  const ResolvedStack resolved = resolve(stack, wavelength_nm);
  const complex eps_m = resolved.media[0].eps;
  std::vector<DrexhagePoint> out(gaps_nm.size());
  parallel_for(gaps_nm.size(), threads, [&](std::size_t i) {
    const double d = gaps_nm[i];
    const EmissionGeometry geom(resolved, 1, d);
    DrexhagePoint p;
    p.gap_nm = d;
    p.gamma_perp = purcell(geom, 0.0, opt).gamma_perp;
    p.radiative = geom.n_host() * integrate_kernels(geom, 0.0, 1.0, opt.quadrature).value[0];
    p.plasmon = plasmon_pole_rate(eps_m, 1.0, wavelength_nm, d);
    p.nonradiative = p.gamma_perp - p.radiative - p.plasmon;
    const auto qs = quasi_static_perp(eps_m, 1.0, wavelength_nm, d);
    p.oracle_total = qs.total;
    p.oracle_nonradiative = qs.nonradiative;
    out[i] = p;
  });
  return out;
}

}  // namespace hmm
