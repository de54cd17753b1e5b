#include "hmm/emission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmm/errors.hpp"
#include "hmm/parallel.hpp"

namespace hmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const complex kI{0.0, 1.0};

void check_theta(double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
    throw DomainError("dipole angle must lie in [0, 90] degrees");
}

complex round_trip(complex r, complex q, double k0, double d) {
  if (!std::isfinite(d)) return 0.0;
  return r * std::exp(2.0 * kI * q * (k0 * d));
}

}  // namespace

std::array<double, 2> orientation_weights(double theta_deg) {
  check_theta(theta_deg);
  if (theta_deg == 45.0) return {0.5, 0.5};
  const double c2 = std::cos(2.0 * theta_deg * std::numbers::pi / 180.0);
  return {0.5 * (1.0 + c2), 0.5 * (1.0 - c2)};
}

EmissionGeometry::EmissionGeometry(const LayerStack& stack, const DipoleSource& dipole)
    : stack_(resolve(stack, dipole.wavelength_nm)), host_(dipole.host_layer) {
  validate_host(dipole.z_nm);
}

EmissionGeometry::EmissionGeometry(ResolvedStack stack, std::size_t host_layer, double z_nm)
    : stack_(std::move(stack)), host_(host_layer) {
  validate_host(z_nm);
}

void EmissionGeometry::validate_host(double z_nm) {
  const std::size_t n = stack_.media.size();
  if (host_ >= n) {
    std::ostringstream os;
    os << "host layer " << host_ << " is outside the stack (media 0.." << n - 1 << ")";
    throw DomainError(os.str());
  }
  const auto& m = stack_.media[host_];
  if (m.perfect_conductor || !(m.eps.real() > 0.0) || m.eps.imag() != 0.0) {
    std::ostringstream os;
    os << "host medium " << host_ << " must be a lossless dielectric, eps = " << m.eps.real()
       << (m.eps.imag() < 0 ? "" : "+") << m.eps.imag() << "i";
    throw DomainError(os.str());
  }
  n_host_ = std::sqrt(m.eps.real());
  if (!std::isfinite(z_nm)) throw DomainError("dipole position must be finite");
  if (host_ == 0) {
    if (!(z_nm > 0.0)) throw DomainError("dipole in the lower cladding needs z > 0");
    d_up_ = z_nm;
    d_down_ = kInf;
  } else if (host_ == n - 1) {
    if (!(z_nm > 0.0)) throw DomainError("dipole in the upper cladding needs z > 0");
    d_down_ = z_nm;
    d_up_ = kInf;
  } else {
    const double t = m.thickness_nm;
    if (!(z_nm > 0.0 && z_nm < t)) {
      std::ostringstream os;
      os << "dipole position z = " << z_nm << " nm must lie strictly inside the host layer (0, "
         << t << ")";
      throw DomainError(os.str());
    }
    d_down_ = z_nm;
    d_up_ = t - z_nm;
  }
}

double EmissionGeometry::d_min() const { return std::min(d_up_, d_down_); }

CavityState EmissionGeometry::cavity(double s, complex cz) const {
  CavityState c;
  c.s = s;
  c.cz = cz;
  const auto st = state(cz);
  const auto up_chain =
      std::span<const ResolvedMedium>(stack_.media).subspan(host_);
  c.up = chain_response(up_chain, stack_.k0, stack_.wavelength_nm, st);
  std::vector<ResolvedMedium> down_chain(stack_.media.rbegin() +
                                             static_cast<std::ptrdiff_t>(stack_.media.size() - 1 - host_),
                                         stack_.media.rend());
  c.down = chain_response(down_chain, stack_.k0, stack_.wavelength_nm, st);
  c.up.s = s;
  c.down.s = s;
  const complex q = n_host_ * cz;
  c.a_s = round_trip(c.up.r_s, q, stack_.k0, d_up_);
  c.a_p = round_trip(c.up.r_p, q, stack_.k0, d_up_);
  c.b_s = round_trip(c.down.r_s, q, stack_.k0, d_down_);
  c.b_p = round_trip(c.down.r_p, q, stack_.k0, d_down_);
  return c;
}

std::array<complex, 2> EmissionGeometry::kernel_numerators(const CavityState& c) const {
  const complex dp = 1.0 - c.a_p * c.b_p;
  const complex ds = 1.0 - c.a_s * c.b_s;
  const complex fp = (1.0 + c.a_p) * (1.0 + c.b_p) / dp;
  const complex fpp = (1.0 - c.a_p) * (1.0 - c.b_p) / dp;
  const complex fs = (1.0 + c.a_s) * (1.0 + c.b_s) / ds;
  const double s = c.s;
  return {s * s * s * fp, s * (fs + c.cz * c.cz * fpp)};
}

std::array<double, 2> EmissionGeometry::kernels(double s) const {
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("s must be finite and >= 0");
  if (s == 1.0) throw DomainError("kernels are singular at s = 1");
  const auto st = TransverseState::from_s(complex(1.0, 0.0), s);
  const auto g = kernel_numerators(cavity(s, st.cz));
  return {1.5 * (g[0] / st.cz).real(), 0.75 * (g[1] / st.cz).real()};
}

DissipationSpectrum dissipation_spectrum(const LayerStack& stack, const DipoleSource& dipole,
                                         const SGrid& grid) {
  if (grid.n_points < 2 || !(grid.s_max > grid.s_min) || !(grid.s_min >= 0.0))
    throw DomainError("s grid needs at least two points and 0 <= s_min < s_max");
  const EmissionGeometry geom(stack, dipole);
  DissipationSpectrum out;
  out.samples.reserve(grid.n_points);
  const double step = (grid.s_max - grid.s_min) / static_cast<double>(grid.n_points - 1);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    double s = i + 1 == grid.n_points ? grid.s_max : grid.s_min + step * static_cast<double>(i);
    if (s == 1.0) s = 1.0 - 1e-9;
    const auto k = geom.kernels(s);
    out.samples.push_back({s, k[0], k[1]});
  }
  return out;
}

namespace {

// Propagating window, s = sin(alpha): Re{G/cz} ds = Re{G} d alpha.
QuadratureResult<2> integrate_window(const EmissionGeometry& geom, double a0, double a1,
                                     const QuadratureOptions& opt) {
  auto f = [&](double alpha) {
    const double s = std::sin(alpha);
    const complex cz(std::cos(alpha), 0.0);
    CavityState c = geom.cavity(s, cz);
    const auto g = geom.kernel_numerators(c);
    return std::array<double, 2>{1.5 * g[0].real(), 0.75 * g[1].real()};
  };
  return integrate_adaptive<2>(f, a0, a1, opt);
}

// Evanescent range, s = cosh(u), cz = i sinh(u): ds/cz = du / i, so Re{G/cz} ds = Im{G} du.
QuadratureResult<2> integrate_evanescent(const EmissionGeometry& geom, double u0, double u1,
                                         const QuadratureOptions& opt) {
  auto f = [&](double u) {
    const double s = std::cosh(u);
    const complex cz(0.0, std::sinh(u));
    CavityState c = geom.cavity(s, cz);
    const auto g = geom.kernel_numerators(c);
    return std::array<double, 2>{1.5 * g[0].imag(), 0.75 * g[1].imag()};
  };
  return integrate_adaptive<2>(f, u0, u1, opt);
}

void accumulate(QuadratureResult<2>& acc, const QuadratureResult<2>& r) {
  for (int i = 0; i < 2; ++i) {
    acc.value[i] += r.value[i];
    acc.error[i] += r.error[i];
  }
  acc.evaluations += r.evaluations;
  acc.intervals += r.intervals;
  acc.converged = acc.converged && r.converged;
}

}  // namespace

QuadratureResult<2> integrate_kernels(const EmissionGeometry& geom, double s_lo, double s_hi,
                                      const QuadratureOptions& opt) {
  if (!(s_lo >= 0.0) || !(s_hi >= s_lo) || !std::isfinite(s_hi))
    throw DomainError("integration range must satisfy 0 <= s_lo <= s_hi < inf");
  QuadratureResult<2> out{};
  out.converged = true;
  if (s_lo < 1.0) {
    const double hi = std::min(s_hi, 1.0);
    accumulate(out, integrate_window(geom, std::asin(s_lo), std::asin(hi), opt));
  }
  if (s_hi > 1.0) {
    const double lo = std::max(s_lo, 1.0);
    accumulate(out, integrate_evanescent(geom, std::acosh(lo), std::acosh(s_hi), opt));
  }
  return out;
}

DecayRates purcell(const EmissionGeometry& geom, double theta_deg, const EmissionOptions& opt) {
  const auto w = orientation_weights(theta_deg);
  QuadratureResult<2> total = integrate_window(geom, 0.0, std::numbers::pi / 2, opt.quadrature);
  if (!total.converged)
    throw AccuracyError("propagating-window quadrature did not converge",
                        std::max(total.error[0], total.error[1]));

  const double a = 2.0 * geom.k_host() * geom.d_min();
  std::array<double, 2> tail{0.0, 0.0};
  double s_lo = 1.0;
  double s_hi = opt.s_floor;
  bool done = false;
  while (!done) {
    QuadratureOptions seg = opt.quadrature;
    const double scale = std::max(std::abs(total.value[0]), std::abs(total.value[1]));
    seg.abs_tol = std::max(seg.abs_tol, 1e-3 * seg.rel_tol * scale);
    const auto r = integrate_evanescent(geom, std::acosh(s_lo), std::acosh(s_hi), seg);
    if (!r.converged)
      throw AccuracyError("evanescent quadrature did not converge on s in [" +
                              std::to_string(s_lo) + ", " + std::to_string(s_hi) + "]",
                          std::max(r.error[0], r.error[1]));
    accumulate(total, r);

    if (!std::isfinite(a)) {
      tail = {0.0, 0.0};
      done = true;
      break;
    }
    const auto k = geom.kernels(s_hi);
    const double rate = std::max(a - 3.0 / s_hi, 0.5 * a);
    bool ok = true;
    for (int i = 0; i < 2; ++i) {
      tail[i] = std::abs(k[i]) / rate;
      if (!(tail[i] <= opt.tail_tol * std::abs(total.value[i]))) ok = false;
    }
    if (ok) {
      done = true;
    } else if (s_hi >= opt.s_ceiling) {
      throw AccuracyError("evanescent tail not converged at s = " + std::to_string(s_hi),
                          geom.n_host() * std::max(tail[0], tail[1]));
    } else {
      s_lo = s_hi;
      s_hi = std::min(2.0 * s_hi, opt.s_ceiling);
    }
  }

  DecayRates out;
  const double n = geom.n_host();
  out.theta_deg = theta_deg;
  out.gamma_perp = n * total.value[0];
  out.gamma_par = n * total.value[1];
  out.gamma_theta = w[0] * out.gamma_perp + w[1] * out.gamma_par;
  out.err_perp = n * (total.error[0] + tail[0]);
  out.err_par = n * (total.error[1] + tail[1]);
  out.err_estimate = w[0] * out.err_perp + w[1] * out.err_par;
  out.s_max = s_hi;
  out.evaluations = total.evaluations;
  return out;
}

DecayRates purcell(const LayerStack& stack, const DipoleSource& dipole, const EmissionOptions& opt) {
  check_theta(dipole.theta_deg);
  return purcell(EmissionGeometry(stack, dipole), dipole.theta_deg, opt);
}

ReferenceSite coverslip_reference() { return {preset_stack("coverslip"), 1, 20.0}; }

double relative_rate(const LayerStack& stack, const DipoleSource& dipole,
                     const ReferenceSite& reference, const EmissionOptions& opt) {
  const double g = purcell(stack, dipole, opt).gamma_theta;
  DipoleSource ref = dipole;
  ref.host_layer = reference.host_layer;
  ref.z_nm = reference.z_nm;
  const double g0 = purcell(reference.stack, ref, opt).gamma_theta;
  return g / g0;
}

std::vector<PositionRates> position_sweep(const LayerStack& stack, const DipoleSource& dipole,
                                          std::span<const double> offsets_nm,
                                          const EmissionOptions& opt, std::size_t threads) {
  check_theta(dipole.theta_deg);
  const ResolvedStack resolved = resolve(stack, dipole.wavelength_nm);
  std::vector<PositionRates> out(offsets_nm.size());
  parallel_for(offsets_nm.size(), threads, [&](std::size_t i) {
    const EmissionGeometry geom(resolved, dipole.host_layer, dipole.z_nm + offsets_nm[i]);
    out[i] = {offsets_nm[i], purcell(geom, dipole.theta_deg, opt)};
  });
  return out;
}

}  // namespace hmm
