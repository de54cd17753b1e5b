#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hmm/emission.hpp"
#include "hmm/emt.hpp"
#include "hmm/farfield.hpp"
#include "hmm/parallel.hpp"
#include "hmm/sweep.hpp"
#include "hmm/validation.hpp"

namespace hmm::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> dipole_wavelengths(const DipoleSpec& d) {
  if (d.wavelength_nm) return {*d.wavelength_nm};
  return wavelength_grid(d.band->min_nm, d.band->max_nm, d.band->n_points);
}

const DipoleSpec& need_dipole(const RunConfig& c) {
  if (!c.dipole) throw ConfigError("dipole", "this command needs a dipole");
  return *c.dipole;
}

double need_single_wavelength(const DipoleSpec& d, const std::string& command) {
  if (!d.wavelength_nm)
    throw ConfigError("dipole.wavelength_nm", "the " + command + " command needs a single wavelength");
  return *d.wavelength_nm;
}

DipoleSource make_dipole(const RunConfig& c, const LayerStack& stack, double wavelength) {
  const auto& d = need_dipole(c);
  DipoleSource s;
  s.wavelength_nm = wavelength;
  s.host_layer = d.host_layer;
  s.theta_deg = d.theta_deg;
  s.z_nm = d.z_nm ? *d.z_nm : *d.z_fraction * stack.thickness_nm(d.host_layer);
  return s;
}

CommandResult run_emt(const RunConfig& c, const RunOptions&) {
  const auto lib = material_library(c);
  const auto& e = c.emt;
  const auto samples = hyperbolicity_band(lib.get(e.metal), lib.get(e.dielectric), e.d_m_nm, e.d_d_nm,
                                          e.band.min_nm, e.band.max_nm, e.band.n_points);
  CommandResult r;
  r.table.columns = {"wavelength_nm", "re_eps_perp", "im_eps_perp", "re_eps_par", "im_eps_par", "is_hyperbolic"};
  r.table.notes = {fmt::format("{}/{} superlattice, d_m = {} nm, d_d = {} nm", e.metal, e.dielectric, e.d_m_nm, e.d_d_nm)};
  std::size_t hyperbolic = 0;
  for (const auto& s : samples) {
    r.table.rows.push_back({s.wavelength_nm, s.eps_perp.real(), s.eps_perp.imag(), s.eps_par.real(),
                            s.eps_par.imag(), s.is_hyperbolic});
    hyperbolic += s.is_hyperbolic ? 1 : 0;
  }
  r.summary = fmt::format("emt: {} of {} samples hyperbolic over {}-{} nm", hyperbolic, samples.size(),
                          e.band.min_nm, e.band.max_nm);
  return r;
}

CommandResult run_purcell(const RunConfig& c, const RunOptions& opt) {
  const auto lib = material_library(c);
  const LayerStack stack = build_stack(c, lib);
  const auto wl = dipole_wavelengths(need_dipole(c));
  std::vector<DecayRates> rates(wl.size());
  parallel_for(wl.size(), opt.threads, [&](std::size_t i) { rates[i] = purcell(stack, make_dipole(c, stack, wl[i])); });

  CommandResult r;
  r.table.columns = {"wavelength_nm", "gamma_perp", "gamma_par", "gamma_theta", "err_estimate"};
  r.table.notes = {fmt::format("rates relative to vacuum; theta = {} deg", c.dipole->theta_deg)};
  std::size_t best = 0;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const auto& g = rates[i];
    r.table.rows.push_back({wl[i], g.gamma_perp, g.gamma_par, g.gamma_theta, g.err_estimate});
    if (g.gamma_theta > rates[best].gamma_theta) best = i;
  }
  r.summary = fmt::format("purcell: peak gamma_theta {:.6g} at {:.6g} nm", rates[best].gamma_theta, wl[best]);
  return r;
}

CommandResult run_spectrum(const RunConfig& c, const RunOptions&) {
  const auto lib = material_library(c);
  const LayerStack stack = build_stack(c, lib);
  const double wl = need_single_wavelength(need_dipole(c), "spectrum");
  const auto spec = dissipation_spectrum(stack, make_dipole(c, stack, wl),
                                         {c.spectrum.s_min, c.spectrum.s_max, c.spectrum.n_points});
  CommandResult r;
  r.table.columns = {"s", "K_perp", "K_par"};
  r.table.notes = {fmt::format("s = k_par / k_host at {} nm; K per unit s, host-bulk units", wl)};
  std::size_t best = 0;
  for (std::size_t i = 0; i < spec.samples.size(); ++i) {
    const auto& s = spec.samples[i];
    r.table.rows.push_back({s.s, s.k_perp, s.k_par});
    if (s.k_perp > spec.samples[best].k_perp) best = i;
  }
  r.summary = fmt::format("spectrum: peak K_perp {:.6g} at s = {:.6g}", spec.samples[best].k_perp,
                          spec.samples[best].s);
  return r;
}

CommandResult run_farfield(const RunConfig& c, const RunOptions&) {
  const auto lib = material_library(c);
  const LayerStack stack = build_stack(c, lib);
  const double wl = need_single_wavelength(need_dipole(c), "farfield");
  const FarField ff(stack, make_dipole(c, stack, wl));
  CommandResult r;
  r.table.columns = {"side", "theta_deg", "p"};
  r.table.notes = {"theta from the outward cladding normal; integral of p sin(theta) dtheta is power in vacuum-rate units"};
  double total[2] = {0.0, 0.0};
  double peak = -1.0, peak_theta = 0.0;
  std::string peak_side;
  for (Side side : {Side::up, Side::down}) {
    const auto pattern = ff.pattern(side, c.farfield.n_theta);
    const std::string name = side == Side::up ? "up" : "down";
    total[side == Side::up ? 0 : 1] = radiated_power(pattern);
    for (const auto& s : pattern.samples) {
      r.table.rows.push_back({name, s.theta_deg, s.p});
      if (s.p > peak) {
        peak = s.p;
        peak_theta = s.theta_deg;
        peak_side = name;
      }
    }
  }
  const double sum = total[0] + total[1];
  r.summary = fmt::format("farfield: up {:.4f}, down {:.4f} of radiated power; peak at {:.4g} deg ({})",
                          sum > 0 ? total[0] / sum : 0.0, sum > 0 ? total[1] / sum : 0.0, peak_theta, peak_side);
  return r;
}

CommandResult run_cpr(const RunConfig& c, const RunOptions& opt) {
  const auto lib = material_library(c);
  const LayerStack stack = build_stack(c, lib);
  const auto& d = need_dipole(c);
  const auto wl = dipole_wavelengths(d);
  const DipoleSource base = make_dipole(c, stack, wl.front());
  const auto points = cpr_spectrum(stack, base, wl.front(), wl.back(), wl.size(), c.collection.na,
                                   c.collection.side, {}, opt.threads);
  CommandResult r;
  r.table.columns = {"wavelength_nm", "fp", "qe", "ce_rad", "ce_tot", "cpr"};
  r.table.notes = {fmt::format("na = {}, side = {}, theta = {} deg", c.collection.na,
                               c.collection.side == Side::up ? "up" : "down", d.theta_deg)};
  std::size_t failed = 0;
  double best = -1.0, best_wl = 0.0;
  for (const auto& p : points) {
    if (p.result) {
      const auto& x = *p.result;
      r.table.rows.push_back({p.wavelength_nm, x.fp, x.qe, x.ce_rad, x.ce_tot, x.cpr});
      if (x.cpr > best) {
        best = x.cpr;
        best_wl = p.wavelength_nm;
      }
    } else {
      ++failed;
      r.table.rows.push_back({p.wavelength_nm, kNaN, kNaN, kNaN, kNaN, kNaN});
      r.table.notes.push_back(fmt::format("failed at {} nm: {}", p.wavelength_nm, p.error));
    }
  }
  r.summary = fmt::format("cpr: peak {:.6g} at {:.6g} nm", best, best_wl);
  if (failed) r.summary += fmt::format(" ({} wavelengths failed, written as nan)", failed);
  return r;
}

CommandResult run_sweep_command(const RunConfig& c, const RunOptions& opt) {
  if (!c.sweep) throw ConfigError("sweep", "the sweep command needs a sweep section");
  const auto& sw = *c.sweep;
  const SweepSpec spec{sw.parameters, sw.objective, sw.cap};
  const Evaluator eval = [&](std::span<const double> params) {
    RunConfig point = c;
    for (std::size_t i = 0; i < params.size(); ++i) point = with_parameter(point, sw.parameters[i].path, params[i]);
    return evaluate_point(point, sw.objective, sw);
  };
  const SweepResult res = run_sweep(spec, eval, opt.threads);

  CommandResult r;
  r.table.columns = res.paths;
  for (const char* m : {"fp_perp", "qe", "ce_tot", "cpr", "objective"}) r.table.columns.emplace_back(m);
  r.table.notes.push_back(fmt::format("objective = {}", to_string(sw.objective)));
  for (const auto& row : res.rows) {
    std::vector<Cell> cells(row.params.begin(), row.params.end());
    for (double v : {row.metrics.fp_perp, row.metrics.qe, row.metrics.ce_tot, row.metrics.cpr, row.objective})
      cells.emplace_back(v);
    r.table.rows.push_back(std::move(cells));
  }
  r.table.notes.push_back(fmt::format("argmax row {}", res.argmax));
  const auto& best = res.rows[res.argmax];
  std::string tuple;
  for (std::size_t i = 0; i < best.params.size(); ++i)
    tuple += fmt::format("{}{} = {:.6g}", i ? ", " : "", res.paths[i], best.params[i]);
  r.summary = fmt::format("sweep: best {} {:.6g} at ({}) over {} points", to_string(sw.objective),
                          best.objective, tuple, res.rows.size());
  return r;
}

CommandResult run_validate(const RunConfig& c, const RunOptions& opt) {
  const auto lib = material_library(c);
  const auto& v = c.validate;
  const auto curve = drexhage_curve(lib.get(v.metal), v.wavelength_nm, v.gaps_nm, {}, opt.threads);
  CommandResult r;
  r.table.columns = {"gap_nm", "gamma_perp", "radiative", "plasmon", "nonradiative",
                     "oracle_total", "oracle_nonradiative", "nonradiative_rel_dev"};
  r.table.notes = {fmt::format("perpendicular dipole in air above {} at {} nm", v.metal, v.wavelength_nm),
                   "nonradiative = gamma_perp - radiative - plasmon; oracle = quasi-static image dipole"};
  double worst = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    const double dev = p.nonradiative / p.oracle_nonradiative - 1.0;
    r.table.rows.push_back({p.gap_nm, p.gamma_perp, p.radiative, p.plasmon, p.nonradiative, p.oracle_total,
                            p.oracle_nonradiative, dev});
    if (p.gap_nm >= 2.0 && p.gap_nm <= 10.0) worst = std::max(worst, std::abs(dev));
    if (i > 0 && curve[i].gap_nm > curve[i - 1].gap_nm && !(curve[i].gamma_perp < curve[i - 1].gamma_perp))
      monotone = false;
  }
  r.summary = fmt::format("validate: max nonradiative deviation {:.2f}% over 2-10 nm (limit {:.0f}%), curve {}",
                          100.0 * worst, 100.0 * v.tolerance, monotone ? "monotone" : "not monotone");
  if (worst > v.tolerance) r.failure = "solver and quasi-static oracle disagree beyond the tolerance";
  else if (!monotone) r.failure = "Drexhage curve is not monotone-decreasing";
  return r;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"emt", "purcell", "spectrum", "farfield", "cpr", "sweep", "validate"};
  return names;
}

Metrics evaluate_point(const RunConfig& c, Objective objective, const SweepConfig& sweep) {
  const auto lib = material_library(c);
  const LayerStack stack = build_stack(c, lib);
  std::vector<double> wl;
  if (sweep.band) wl = wavelength_grid(sweep.band->min_nm, sweep.band->max_nm, sweep.band->n_points);
  else if (sweep.wavelength_nm) wl = {*sweep.wavelength_nm};
  else wl = dipole_wavelengths(need_dipole(c));

  std::vector<Metrics> per(wl.size());
  for (std::size_t i = 0; i < wl.size(); ++i) {
    const DipoleSource d = make_dipole(c, stack, wl[i]);
    Metrics m{kNaN, kNaN, kNaN, kNaN};
    if (objective == Objective::fp_perp) {
      m.fp_perp = purcell(stack, d).gamma_perp;
    } else {
      const auto x = collection(stack, d, c.collection.na, c.collection.side);
      m = {x.gamma_perp, x.qe, x.ce_tot, x.cpr};
    }
    per[i] = m;
  }
  if (wl.size() == 1) return per.front();

  auto average = [&](double Metrics::*field) {
    std::vector<BandSample> s;
    for (std::size_t i = 0; i < wl.size(); ++i) s.push_back({wl[i], per[i].*field});
    if (std::isnan(s.front().value)) return kNaN;
    return band_average(s, wl.front(), wl.back());
  };
  return {average(&Metrics::fp_perp), average(&Metrics::qe), average(&Metrics::ce_tot), average(&Metrics::cpr)};
}

CommandResult compute(const std::string& command, const RunConfig& config, const RunOptions& opt) {
  if (command == "emt") return run_emt(config, opt);
  if (command == "purcell") return run_purcell(config, opt);
  if (command == "spectrum") return run_spectrum(config, opt);
  if (command == "farfield") return run_farfield(config, opt);
  if (command == "cpr") return run_cpr(config, opt);
  if (command == "sweep") return run_sweep_command(config, opt);
  if (command == "validate") return run_validate(config, opt);
  throw ConfigError("", "unknown command '" + command + "'");
}

std::filesystem::path run(const std::string& command, const RunConfig& config, const RunOptions& opt,
                          CommandResult* result) {
  CommandResult r = compute(command, config, opt);
  const std::string format = opt.format.value_or(config.output.format);
  if (format != "csv" && format != "json") throw ConfigError("output.format", "expected csv or json");
  const std::filesystem::path dir = opt.out_dir.value_or(std::filesystem::path(config.output.directory));
  const auto path = dir / (command + "." + format);
  write_atomically(path, format == "csv" ? to_csv(r.table) : to_json(r.table).dump(2) + "\n");
  if (result) *result = std::move(r);
  return path;
}

}  // namespace hmm::app
