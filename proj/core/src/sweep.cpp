#include "hmm/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmm/errors.hpp"
#include "hmm/parallel.hpp"

namespace hmm {

std::vector<double> SweepAxis::values() const {
  if (n_points == 0) throw DomainError("sweep axis '" + path + "' needs n_points >= 1");
  if (!std::isfinite(min) || !std::isfinite(max))
    throw DomainError("sweep axis '" + path + "' needs finite bounds");
  if (n_points == 1) return {min};
  if (!(max > min)) throw DomainError("sweep axis '" + path + "' needs max > min");
  std::vector<double> v(n_points);
  const double step = (max - min) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i)
    v[i] = i + 1 == n_points ? max : min + step * static_cast<double>(i);
  return v;
}

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::fp_perp: return "fp_perp";
    case Objective::qe: return "qe";
    case Objective::ce_tot: return "ce_tot";
    case Objective::cpr: return "cpr";
  }
  return "";
}

Objective objective_from_string(std::string_view name) {
  for (auto o : {Objective::fp_perp, Objective::qe, Objective::ce_tot, Objective::cpr})
    if (to_string(o) == name) return o;
  throw DomainError("unknown objective '" + std::string(name) +
                    "'; expected one of fp_perp, qe, ce_tot, cpr");
}

double Metrics::get(Objective o) const {
  switch (o) {
    case Objective::fp_perp: return fp_perp;
    case Objective::qe: return qe;
    case Objective::ce_tot: return ce_tot;
    case Objective::cpr: return cpr;
  }
  return 0.0;
}

std::size_t SweepSpec::grid_size() const {
  if (axes.empty()) throw DomainError("sweep needs at least one parameter");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.n_points == 0) throw DomainError("sweep axis '" + a.path + "' needs n_points >= 1");
    if (total > grid_cap / a.n_points) {
      std::ostringstream os;
      os << "sweep grid exceeds the cap of " << grid_cap << " points";
      throw DomainError(os.str());
    }
    total *= a.n_points;
  }
  return total;
}

std::size_t argmax_row(std::span<const SweepRow> rows) {
  if (rows.empty()) throw DomainError("argmax of an empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto& b = rows[best];
    if (r.objective > b.objective ||
        (r.objective == b.objective &&
         std::lexicographical_compare(r.params.begin(), r.params.end(), b.params.begin(),
                                      b.params.end())))
      best = i;
  }
  return best;
}

namespace {

std::string describe(const SweepSpec& spec, std::span<const double> params) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < params.size(); ++i)
    os << (i ? ", " : "") << spec.axes[i].path << " = " << params[i];
  os << ")";
  return os.str();
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const Evaluator& evaluate, std::size_t threads) {
  const std::size_t total = spec.grid_size();
  std::vector<std::vector<double>> values;
  for (const auto& a : spec.axes) values.push_back(a.values());

  SweepResult out;
  for (const auto& a : spec.axes) out.paths.push_back(a.path);
  out.rows.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto& params = out.rows[i].params;
    params.resize(values.size());
    std::size_t rest = i;
    for (std::size_t k = values.size(); k-- > 0;) {
      params[k] = values[k][rest % values[k].size()];
      rest /= values[k].size();
    }
  }

  parallel_for(total, threads, [&](std::size_t i) {
    auto& row = out.rows[i];
    try {
      row.metrics = evaluate(row.params);
    } catch (const Error& e) {
      throw Error(e.category(), "sweep point " + describe(spec, row.params) + ": " + e.what());
    }
    row.objective = row.metrics.get(spec.objective);
    if (!std::isfinite(row.objective))
      throw AccuracyError("sweep point " + describe(spec, row.params) + " gave a non-finite objective",
                          row.objective);
  });
  out.argmax = argmax_row(out.rows);
  return out;
}

double band_average(std::span<const BandSample> samples, double lambda_min_nm, double lambda_max_nm) {
  if (!(lambda_min_nm < lambda_max_nm)) throw DomainError("band needs lambda_min < lambda_max");
  std::vector<BandSample> in;
  for (const auto& s : samples)
    if (s.wavelength_nm >= lambda_min_nm && s.wavelength_nm <= lambda_max_nm) in.push_back(s);
  std::sort(in.begin(), in.end(),
            [](const BandSample& a, const BandSample& b) { return a.wavelength_nm < b.wavelength_nm; });
  if (in.size() < 2) throw DomainError("band average needs at least two samples inside the band");
  double area = 0.0;
  for (std::size_t i = 1; i < in.size(); ++i)
    area += 0.5 * (in[i].value + in[i - 1].value) * (in[i].wavelength_nm - in[i - 1].wavelength_nm);
  const double width = in.back().wavelength_nm - in.front().wavelength_nm;
  if (!(width > 0.0)) throw DomainError("band average needs distinct wavelengths");
  return area / width;
}

}  // namespace hmm
