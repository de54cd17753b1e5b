#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hmm/emission.hpp"
#include "hmm/errors.hpp"
#include "hmm/sweep.hpp"

using namespace hmm;

namespace {

Metrics plant(std::span<const double> p) {
  Metrics m;
  m.fp_perp = 3.0 * p[0] - 0.1 * (p.size() > 1 ? p[1] * p[1] : 0.0);
  m.qe = 0.5;
  m.ce_tot = 0.25;
  m.cpr = m.fp_perp * m.ce_tot;
  return m;
}

LayerStack au_zns_with_middle(double t) {
  const auto& zns = builtin_material("zns");
  const auto& au = builtin_material("au");
  return LayerStack(builtin_material("glass"),
                    {{zns, 30.0}, {au, 30.0}, {zns, t}, {au, 30.0}, {zns, 30.0}},
                    builtin_material("air"));
}

}  // namespace

TEST_CASE("axis values") {
  CHECK(SweepAxis{"a", 2.0, 9.0, 1}.values() == std::vector<double>{2.0});
  const auto v = SweepAxis{"a", 30.0, 80.0, 11}.values();
  REQUIRE(v.size() == 11);
  CHECK(v.front() == 30.0);
  CHECK(v.back() == 80.0);
  CHECK(v[3] == doctest::Approx(45.0));
}

TEST_CASE("objective names round-trip") {
  for (auto o : {Objective::fp_perp, Objective::qe, Objective::ce_tot, Objective::cpr})
    CHECK(objective_from_string(to_string(o)) == o);
  CHECK_THROWS_AS(objective_from_string("speed"), DomainError);
}

TEST_CASE("a one-point grid is the direct computation") {
  SweepSpec spec{{{"x", 4.0, 4.0, 1}}, Objective::fp_perp};
  const auto r = run_sweep(spec, plant);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.argmax == 0);
  CHECK(r.rows[0].objective == plant(std::vector<double>{4.0}).fp_perp);
  CHECK(r.paths == std::vector<std::string>{"x"});
}

TEST_CASE("monotone plant peaks at the grid boundary") {
  SweepSpec spec{{{"x", 1.0, 5.0, 9}, {"y", -2.0, 2.0, 5}}, Objective::cpr};
  const auto r = run_sweep(spec, plant);
  CHECK(r.rows.size() == 45);
  CHECK(r.rows[r.argmax].params == std::vector<double>{5.0, 0.0});
  // Row-major, last axis fastest.
  CHECK(r.rows[1].params == std::vector<double>{1.0, -1.0});
  CHECK(r.rows[5].params == std::vector<double>{1.5, -2.0});
  for (const auto& row : r.rows) CHECK(row.objective <= r.rows[r.argmax].objective);
}

TEST_CASE("ties go to the lexicographically smallest tuple") {
  SweepSpec spec{{{"x", 0.0, 2.0, 3}, {"y", -1.0, 1.0, 3}}, Objective::qe};
  const auto r = run_sweep(spec, plant);
  CHECK(r.rows[r.argmax].params == std::vector<double>{0.0, -1.0});
  std::vector<SweepRow> rows{{{2.0, 1.0}, 7.0, {}}, {{1.0, 3.0}, 7.0, {}}, {{1.0, 2.0}, 7.0, {}}, {{0.0, 0.0}, 6.0, {}}};
  CHECK(argmax_row(rows) == 2);
}

TEST_CASE("argmax is invariant under scaling and axis permutation") {
  auto scaled = [](std::span<const double> p) {
    auto m = plant(p);
    m.cpr *= 17.5;
    return m;
  };
  const SweepSpec spec{{{"x", 1.0, 5.0, 9}, {"y", -2.0, 2.0, 5}}, Objective::cpr};
  const auto a = run_sweep(spec, plant);
  const auto b = run_sweep(spec, scaled);
  CHECK(a.rows[a.argmax].params == b.rows[b.argmax].params);

  const SweepSpec swapped{{{"y", -2.0, 2.0, 5}, {"x", 1.0, 5.0, 9}}, Objective::cpr};
  const auto c = run_sweep(swapped, [](std::span<const double> p) {
    const std::vector<double> q{p[1], p[0]};
    return plant(q);
  });
  CHECK(c.rows[c.argmax].params == std::vector<double>{0.0, 5.0});
}

TEST_CASE("results do not depend on the worker count") {
  const SweepSpec spec{{{"x", 1.0, 5.0, 21}, {"y", -2.0, 2.0, 13}}, Objective::fp_perp};
  const auto a = run_sweep(spec, plant, 1);
  const auto b = run_sweep(spec, plant, 6);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].params == b.rows[i].params);
    CHECK(a.rows[i].objective == b.rows[i].objective);
  }
  CHECK(a.argmax == b.argmax);
}

TEST_CASE("grid cap and failures") {
  SweepSpec big{{{"x", 0, 1, 1000}, {"y", 0, 1, 1000}, {"z", 0, 1, 2}}, Objective::fp_perp};
  CHECK_THROWS_AS(big.grid_size(), DomainError);
  CHECK_THROWS_AS(run_sweep(big, plant), DomainError);
  big.grid_cap = 3'000'000;
  CHECK(big.grid_size() == 2'000'000);
  SweepSpec huge{{{"x", 0, 1, std::size_t(1) << 40}, {"y", 0, 1, std::size_t(1) << 40}}, Objective::fp_perp};
  CHECK_THROWS_AS(huge.grid_size(), DomainError);
  SweepSpec zero{{{"x", 0, 1, 0}}, Objective::fp_perp};
  CHECK_THROWS_AS(run_sweep(zero, plant), DomainError);

  const SweepSpec spec{{{"x", 1.0, 3.0, 3}}, Objective::fp_perp};
  try {
    run_sweep(spec, [](std::span<const double> p) -> Metrics {
      if (p[0] == 2.0) throw RangeError("outside band");
      return plant(p);
    });
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.category() == Error::Category::range);
    CHECK(std::string(e.what()).find("x = 2") != std::string::npos);
    CHECK(std::string(e.what()).find("outside band") != std::string::npos);
  }
  CHECK_THROWS_AS(run_sweep(spec, [](std::span<const double>) {
                    Metrics m;
                    m.fp_perp = std::nan("");
                    return m;
                  }),
                  AccuracyError);
}

TEST_CASE("band averages") {
  const std::vector<BandSample> flat{{600, 5}, {700, 5}, {850, 5}, {1000, 5}, {1100, 5}};
  CHECK(band_average(flat, 700, 1000) == doctest::Approx(5.0));
  CHECK(band_average(flat, 600, 1100) == doctest::Approx(5.0));
  std::vector<BandSample> ramp;
  for (int i = 0; i <= 30; ++i) ramp.push_back({700.0 + 10 * i, 10.0 * i / 30.0});
  CHECK(band_average(ramp, 700, 1000) == doctest::Approx(5.0));
  CHECK_THROWS_AS(band_average(flat, 710, 720), DomainError);
  CHECK_THROWS_AS(band_average(flat, 1000, 700), DomainError);

  // Hand trapezoid over a sampled gold/ZnS Purcell spectrum.
  const auto stack = preset_stack("au-zns");
  std::vector<BandSample> fp;
  for (int i = 0; i <= 12; ++i) {
    const double wl = 700.0 + 25.0 * i;
    fp.push_back({wl, purcell(stack, {wl, kPresetHostLayer, 25.0, 0.0}).gamma_perp});
  }
  double area = 0.0;
  for (std::size_t i = 1; i < fp.size(); ++i)
    area += 0.5 * (fp[i].value + fp[i - 1].value) * (fp[i].wavelength_nm - fp[i - 1].wavelength_nm);
  CHECK(band_average(fp, 700, 1000) == doctest::Approx(area / 300.0).epsilon(1e-14));
}

TEST_CASE("middle-layer thickness sweep agrees with a ten-times finer scan") {
  auto evaluate = [](std::span<const double> p) {
    Metrics m;
    m.fp_perp = purcell(au_zns_with_middle(p[0]), {900, kPresetHostLayer, 0.5 * p[0], 0.0}).gamma_perp;
    return m;
  };
  const auto coarse = run_sweep({{{"stack.layers[2].thickness_nm", 30, 80, 11}}, Objective::fp_perp}, evaluate, 4);
  const auto fine = run_sweep({{{"stack.layers[2].thickness_nm", 30, 80, 101}}, Objective::fp_perp}, evaluate, 4);
  const double step = 5.0;
  CHECK(std::abs(coarse.rows[coarse.argmax].params[0] - fine.rows[fine.argmax].params[0]) <= step);
  CHECK(fine.rows[fine.argmax].objective >= coarse.rows[coarse.argmax].objective);
}
