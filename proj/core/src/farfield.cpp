#include "hmm/farfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmm/errors.hpp"
#include "hmm/parallel.hpp"

namespace hmm {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool is_lossless_dielectric(const ResolvedMedium& m) {
  return !m.perfect_conductor && m.eps.imag() == 0.0 && m.eps.real() > 0.0;
}

std::size_t cladding_index_of(const ResolvedStack& st, Side side) {
  return side == Side::up ? st.media.size() - 1 : 0;
}

complex cz_of(double s) {
  return s <= 1.0 ? complex(std::sqrt(1.0 - s * s), 0.0) : complex(0.0, std::sqrt(s * s - 1.0));
}

struct SideView {
  const HalfSpaceResponse* near;  // response on the emitting side
  complex a_s, a_p;               // round trips on that side
  complex b_s, b_p;               // round trips on the opposite side
  double d_near;
};

SideView view(const CavityState& c, const EmissionGeometry& g, Side side) {
  if (side == Side::up) return {&c.up, c.a_s, c.a_p, c.b_s, c.b_p, g.d_up()};
  return {&c.down, c.b_s, c.b_p, c.a_s, c.a_p, g.d_down()};
}

complex outward_phase(complex q, double k0, double d) {
  if (!std::isfinite(d)) return 1.0;
  return std::exp(complex(0.0, 1.0) * q * (k0 * d));
}

// Amplitude of the outgoing wave at the host boundary, relative to the direct source term.
complex boundary_amplitude(complex a, complex b, double sigma, complex phase) {
  return phase * (1.0 + sigma * b) / (1.0 - a * b);
}

}  // namespace

FarField::FarField(const LayerStack& stack, const DipoleSource& dipole)
    : FarField(EmissionGeometry(stack, dipole), dipole.theta_deg) {}

FarField::FarField(EmissionGeometry geom, double theta_deg)
    : geom_(std::move(geom)), theta_deg_(theta_deg), weights_(orientation_weights(theta_deg)) {}

std::optional<double> FarField::cladding_index(Side side) const {
  const auto& m = geom_.stack().media[cladding_index_of(geom_.stack(), side)];
  if (m.perfect_conductor) return std::nullopt;
  return std::sqrt(m.eps).real();
}

void FarField::require_lossless(Side side) const {
  const auto& m = geom_.stack().media[cladding_index_of(geom_.stack(), side)];
  if (m.perfect_conductor || is_lossless_dielectric(m)) return;
  std::ostringstream os;
  os << (side == Side::up ? "upper" : "lower") << " cladding absorbs (eps = " << m.eps.real() << "+"
     << m.eps.imag() << "i); far fields are only defined in a lossless cladding";
  throw DomainError(os.str());
}

double FarField::transmitted_density_over_s(Side side, double s) const {
  return density_over_s(side, s, cz_of(s));
}

double FarField::density_over_s(Side side, double s, complex cz) const {
  const auto& m = geom_.stack().media[cladding_index_of(geom_.stack(), side)];
  if (m.perfect_conductor) return 0.0;
  const CavityState c = geom_.cavity(s, cz);
  const SideView v = view(c, geom_, side);
  const double n = geom_.n_host();
  const complex phase = outward_phase(n * cz, geom_.stack().k0, v.d_near);
  const double flux_s = std::max(0.0, flux_factor(v.near->q_far, v.near->eps_far, Polarization::s));
  const double flux_p = std::max(0.0, flux_factor(v.near->q_far, v.near->eps_far, Polarization::p));
  if (flux_s == 0.0 && flux_p == 0.0) return 0.0;
  const double cz2 = std::norm(cz);

  const complex tp = v.near->t_p;
  const complex ts = v.near->t_s;
  const double perp =
      0.75 * n * s * s / cz2 * std::norm(tp * boundary_amplitude(v.a_p, v.b_p, 1.0, phase)) * flux_p;
  const double par_s =
      0.375 / (n * cz2) * std::norm(ts * boundary_amplitude(v.a_s, v.b_s, 1.0, phase)) * flux_s;
  const double par_p =
      0.375 * n * std::norm(tp * boundary_amplitude(v.a_p, v.b_p, -1.0, phase)) * flux_p;
  return weights_[0] * perp + weights_[1] * (par_s + par_p);
}

double FarField::host_flux_density(Side side, double s) const {
  const complex cz = cz_of(s);
  const CavityState c = geom_.cavity(s, cz);
  const SideView v = view(c, geom_, side);
  const double n = geom_.n_host();
  const complex q = n * cz;
  const complex phase = outward_phase(q, geom_.stack().k0, v.d_near);
  auto flux = [&](complex r, double g) { return (q * (1.0 + std::conj(r)) * (1.0 - r)).real() / g; };
  const double cz2 = std::norm(cz);
  const double eps_h = n * n;
  const double perp = 0.75 * n * s * s * s / cz2 *
                      std::norm(boundary_amplitude(v.a_p, v.b_p, 1.0, phase)) *
                      flux(v.near->r_p, eps_h);
  const double par_s = 0.375 * s / (n * cz2) *
                       std::norm(boundary_amplitude(v.a_s, v.b_s, 1.0, phase)) *
                       flux(v.near->r_s, 1.0);
  const double par_p = 0.375 * n * s * std::norm(boundary_amplitude(v.a_p, v.b_p, -1.0, phase)) *
                       flux(v.near->r_p, eps_h);
  return weights_[0] * perp + weights_[1] * (par_s + par_p);
}

AngularPattern FarField::pattern(Side side, std::size_t n_theta) const {
  return pattern(side, n_theta, {});
}

AngularPattern FarField::pattern(Side side, std::size_t n_theta,
                                 std::span<const double> extra_nodes_deg) const {
  if (n_theta < 2) throw DomainError("angular pattern needs at least two theta samples");
  require_lossless(side);
  AngularPattern out;
  out.side = side;
  const auto nc = cladding_index(side);
  out.n_cladding = nc.value_or(0.0);

  std::vector<double> nodes;
  nodes.reserve(n_theta + extra_nodes_deg.size() + geom_.stack().media.size());
  for (std::size_t i = 0; i < n_theta; ++i)
    nodes.push_back(i + 1 == n_theta ? 90.0 : 90.0 * static_cast<double>(i) / (n_theta - 1));
  for (double t : extra_nodes_deg)
    if (t > 0.0 && t < 90.0) nodes.push_back(t);
  const double step = 90.0 / static_cast<double>(n_theta - 1);
  if (nc) {
    for (const auto& m : geom_.stack().media) {
      if (!is_lossless_dielectric(m)) continue;
      const double nj = std::sqrt(m.eps.real());
      if (!(nj < *nc)) continue;
      // The pattern has a square-root kink here; grade the grid towards it.
      const double tc = std::asin(nj / *nc) / kDeg;
      nodes.push_back(tc);
      for (int k = 1; k <= 12; ++k) {
        const double h = step * std::ldexp(1.0, -k);
        if (tc - h > 0.0) nodes.push_back(tc - h);
        if (tc + h < 90.0) nodes.push_back(tc + h);
      }
    }
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  out.samples.reserve(nodes.size());
  const double ratio = nc ? *nc / geom_.n_host() : 0.0;
  for (double t : nodes) {
    double p = 0.0;
    if (nc) {
      double th = t * kDeg;
      double s = ratio * std::sin(th);
      // The host light line s = 1 is a removable 0/0; step just inside it.
      if (std::abs(1.0 - s) < 1e-10) {
        th -= 1e-6;
        s = ratio * std::sin(th);
      }
      // 1 - s^2 without cancellation near the host light line.
      const double c = std::cos(th);
      const double cz2 = (1.0 - ratio) * (1.0 + ratio) + ratio * ratio * c * c;
      const complex cz = cz2 >= 0.0 ? complex(std::sqrt(cz2), 0.0) : complex(0.0, std::sqrt(-cz2));
      p = *nc * c * ratio * density_over_s(side, s, cz);
    }
    out.samples.push_back({t, p});
  }
  return out;
}

double FarField::outgoing_power_at_host(Side side, const QuadratureOptions& opt) const {
  require_lossless(side);
  const auto nc = cladding_index(side);
  if (!nc) return 0.0;
  const double s_top = *nc / geom_.n_host();
  double total = 0.0;
  auto window = [&](double alpha) {
    return std::array<double, 1>{host_flux_density(side, std::sin(alpha)) * std::cos(alpha)};
  };
  const auto r1 = integrate_adaptive<1>(window, 0.0, std::asin(std::min(1.0, s_top)), opt);
  total += r1.value[0];
  if (s_top > 1.0) {
    auto tail = [&](double u) {
      return std::array<double, 1>{host_flux_density(side, std::cosh(u)) * std::sinh(u)};
    };
    total += integrate_adaptive<1>(tail, 0.0, std::acosh(s_top), opt).value[0];
  }
  return geom_.n_host() * total;
}

AngularPattern angular_pattern(const LayerStack& stack, const DipoleSource& dipole, Side side,
                               std::size_t n_theta) {
  return FarField(stack, dipole).pattern(side, n_theta);
}

double radiated_power(const AngularPattern& pattern, double theta_max_deg) {
  double sum = 0.0;
  const auto& v = pattern.samples;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double t0 = v[i - 1].theta_deg;
    if (t0 >= theta_max_deg) break;
    double t1 = v[i].theta_deg;
    double f1 = v[i].p * std::sin(t1 * kDeg);
    const double f0 = v[i - 1].p * std::sin(t0 * kDeg);
    if (t1 > theta_max_deg) {
      const double w = (theta_max_deg - t0) / (t1 - t0);
      f1 = f0 + w * (f1 - f0);
      t1 = theta_max_deg;
    }
    sum += 0.5 * (f0 + f1) * (t1 - t0) * kDeg;
  }
  return sum;
}

namespace {

struct Budget {
  EnergyBudget energy;
  AngularPattern collected_side;
};

Budget budget(const FarField& ff, const FarFieldOptions& opt, Side side,
              std::span<const double> extra_nodes) {
  Budget b;
  b.energy.rates = purcell(ff.geometry(), ff.theta_deg(), opt.emission);
  AngularPattern up = ff.pattern(Side::up, opt.n_theta, side == Side::up ? extra_nodes : std::span<const double>{});
  AngularPattern down =
      ff.pattern(Side::down, opt.n_theta, side == Side::down ? extra_nodes : std::span<const double>{});
  b.energy.radiated_up = radiated_power(up);
  b.energy.radiated_down = radiated_power(down);
  b.energy.qe = (b.energy.radiated_up + b.energy.radiated_down) / b.energy.rates.gamma_theta;
  b.collected_side = side == Side::up ? std::move(up) : std::move(down);
  return b;
}

}  // namespace

EnergyBudget energy_budget(const LayerStack& stack, const DipoleSource& dipole,
                           const FarFieldOptions& opt) {
  return budget(FarField(stack, dipole), opt, Side::up, {}).energy;
}

double quantum_efficiency(const LayerStack& stack, const DipoleSource& dipole,
                          const FarFieldOptions& opt) {
  return energy_budget(stack, dipole, opt).qe;
}

CollectionResult collection(const LayerStack& stack, const DipoleSource& dipole, double na, Side side,
                            const FarFieldOptions& opt) {
  const FarField ff(stack, dipole);
  const auto nc = ff.cladding_index(side);
  if (!nc) throw DomainError("cannot collect through a perfectly conducting cladding");
  if (!(na > 0.0) || !(na <= *nc)) {
    std::ostringstream os;
    os << "numerical aperture " << na << " must lie in (0, " << *nc << "] for this cladding";
    throw DomainError(os.str());
  }
  const double theta_max = na == *nc ? 90.0 : std::asin(na / *nc) / kDeg;
  const double extra[] = {theta_max};
  const Budget b = budget(ff, opt, side, extra);

  CollectionResult out;
  out.wavelength_nm = dipole.wavelength_nm;
  out.fp = b.energy.rates.gamma_theta;
  out.gamma_perp = b.energy.rates.gamma_perp;
  out.qe = b.energy.qe;
  const double radiated = b.energy.radiated_up + b.energy.radiated_down;
  out.ce_rad = radiated > 0.0 ? radiated_power(b.collected_side, theta_max) / radiated : 0.0;
  out.ce_tot = out.qe * out.ce_rad;
  out.cpr = out.fp * out.qe * out.ce_rad;
  out.na = na;
  out.theta_max_deg = theta_max;
  out.side = side;
  return out;
}

std::vector<double> wavelength_grid(double lambda_min_nm, double lambda_max_nm, std::size_t n) {
  if (n == 0) throw DomainError("wavelength grid needs at least one point");
  if (n == 1) {
    if (lambda_min_nm != lambda_max_nm)
      throw DomainError("a single-point wavelength grid needs lambda_min == lambda_max");
    return {lambda_min_nm};
  }
  if (!(lambda_min_nm < lambda_max_nm)) throw DomainError("wavelength grid needs lambda_min < lambda_max");
  std::vector<double> out(n);
  const double step = (lambda_max_nm - lambda_min_nm) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = i + 1 == n ? lambda_max_nm : lambda_min_nm + step * static_cast<double>(i);
  return out;
}

std::vector<CprPoint> cpr_spectrum(const LayerStack& stack, const DipoleSource& dipole,
                                   double lambda_min_nm, double lambda_max_nm, std::size_t n,
                                   double na, Side side, const FarFieldOptions& opt,
                                   std::size_t threads) {
  const auto grid = wavelength_grid(lambda_min_nm, lambda_max_nm, n);
  std::vector<CprPoint> out(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) {
    out[i].wavelength_nm = grid[i];
    DipoleSource d = dipole;
    d.wavelength_nm = grid[i];
    try {
      out[i].result = collection(stack, d, na, side, opt);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace hmm
