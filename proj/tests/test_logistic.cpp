#include <doctest.h>

#include <cmath>
#include <vector>

#include "tacts/error.hpp"
#include "tacts/logistic.hpp"

using namespace tacts;

TEST_CASE("logistic trajectory follows the drifting map") {
  const DriftSchedule sch{3.5, 4.0, 500};
  const IrregularSeries s = logistic_trajectory(sch, 0.4, 10);
  REQUIRE(s.size() == 500);
  double x = 0.4;
  for (int i = 0; i < 10; ++i) x = 3.5 * x * (1.0 - x);
  for (std::size_t n = 0; n < 500; ++n) {
    x = sch.r_at(static_cast<double>(n)) * x * (1.0 - x);
    CHECK(s.times()[n] == static_cast<double>(n + 1));
    CHECK(s.values()[n] == x);
  }
  CHECK_THROWS_AS(logistic_trajectory(sch, 0.0), Error);
  CHECK_THROWS_AS(logistic_trajectory(DriftSchedule{3.5, 4.5, 10}, 0.3), Error);
}

TEST_CASE("constant parameter trajectories") {
  const IrregularSeries deg = logistic_trajectory({4.0, 4.0, 5}, 0.5, 0);
  CHECK(deg.values()[0] == 1.0);
  CHECK(deg.values()[1] == 0.0);
  for (std::size_t n = 2; n < deg.size(); ++n) CHECK(deg.values()[n] == 0.0);

  const IrregularSeries fixed = logistic_trajectory({2.0, 2.0, 200}, 0.13, 0);
  CHECK(fixed.values().back() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("distortion removes points and bounds the noise") {
  const IrregularSeries s = logistic_trajectory({3.6, 3.9, 2000}, 0.3);
  const IrregularSeries d = distort(s, {0.2, 0.3, 77});
  CHECK(d.size() == 1600);
  std::vector<double> kept;
  std::vector<std::size_t> source;
  std::size_t j = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    while (s.times()[j] != d.times()[i]) ++j;
    kept.push_back(s.values()[j]);
    source.push_back(j);
  }
  const double bound = 0.3 * moments(kept).std;
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(std::abs(d.values()[i] - s.values()[source[i]]) <= bound * (1 + 1e-12));
  const IrregularSeries again = distort(s, {0.2, 0.3, 77});
  CHECK(std::equal(d.values().begin(), d.values().end(), again.values().begin()));
  const IrregularSeries other = distort(s, {0.2, 0.3, 78});
  CHECK(!std::equal(d.times().begin(), d.times().end(), other.times().begin()));
  const IrregularSeries clean = distort(s, {0.0, 0.0, 1});
  CHECK(std::equal(clean.values().begin(), clean.values().end(), s.values().begin()));
  CHECK_THROWS_AS(distort(s, {1.0, 0.1, 1}), Error);
  CHECK_THROWS_AS(distort(s, {0.1, -0.1, 1}), Error);
}

TEST_CASE("Lyapunov exponents") {
  CHECK(std::abs(lyapunov_exponent(4.0, 1000, 100000).exponent - std::log(2.0)) < 0.01);
  CHECK(lyapunov_exponent(3.2).exponent < 0.0);
  CHECK(lyapunov_exponent(3.9).exponent > 0.0);
  // Period-2 orbit at r = 3.2: Lambda = ln|r^2 (1-2x1)(1-2x2)| / 2.
  const double r = 3.2;
  const double disc = std::sqrt((r + 1) * (r - 3));
  const double x1 = (r + 1 + disc) / (2 * r), x2 = (r + 1 - disc) / (2 * r);
  const double analytic = 0.5 * std::log(std::abs(r * r * (1 - 2 * x1) * (1 - 2 * x2)));
  CHECK(lyapunov_exponent(r).exponent == doctest::Approx(analytic).epsilon(1e-6));
  CHECK_THROWS_AS(lyapunov_exponent(4.1), Error);
  CHECK_THROWS_AS(lyapunov_exponent(3.5, 10, 10), Error);
}

TEST_CASE("Lyapunov table and ground truth") {
  const DriftSchedule sch{3.5, 4.0, 20000};
  const LyapunovTable tab(sch, 201);
  REQUIRE(tab.r_grid().size() == 201);
  CHECK(tab.r_grid().front() == 3.5);
  CHECK(tab.r_grid().back() == 4.0);
  CHECK(tab.exponent_at_r(3.5011) == tab.exponents()[0]);
  CHECK(tab.exponent_at_r(3.5014) == tab.exponents()[1]);
  CHECK(tab.exponent_at_r(9.0) == tab.exponents().back());
  const std::vector<double> times{0.0, 19999.0};
  const RegimeLabels gt = ground_truth(sch, tab, times);
  CHECK(gt.labels[0] == Regime::periodic);   // r = 3.5, period 4
  CHECK(gt.labels[1] == Regime::chaotic);    // r close to 4
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(gt.marginal[i] == (std::abs(gt.exponents[i]) < LyapunovTable::marginal_band));
  }
}

TEST_CASE("classification and mismatch") {
  const std::vector<double> v{0.9, 0.1, NAN, 0.8, 0.2};
  const std::vector<std::uint8_t> ok{1, 1, 0, 1, 1};
  const auto labels = classify_by_det(v, ok);
  CHECK(labels[0] == Regime::periodic);
  CHECK(labels[1] == Regime::chaotic);
  CHECK(labels[2] == Regime::unknown);
  const std::vector<Regime> truth{Regime::periodic, Regime::periodic, Regime::chaotic,
                                  Regime::periodic, Regime::unknown};
  CHECK(mismatch_ratio(labels, truth) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(mismatch_ratio(labels, std::vector<Regime>(2)), Error);
  const std::vector<Regime> unknown(5, Regime::unknown);
  CHECK_THROWS_AS(mismatch_ratio(labels, unknown), Error);
}

TEST_CASE("linear interpolation baseline") {
  const IrregularSeries s({0.0, 2.0, 3.0}, {0.0, 4.0, 1.0});
  const auto v = linear_interpolation_baseline(s, RegularTimeline(0.0, 0.5, 7));
  const std::vector<double> want{0.0, 1.0, 2.0, 3.0, 4.0, 2.5, 1.0};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(v[i] == doctest::Approx(want[i]));
  CHECK_THROWS_AS(linear_interpolation_baseline(s, RegularTimeline(-1.0, 1.0, 2)), Error);
  CHECK_THROWS_AS(linear_interpolation_baseline(s, RegularTimeline(0.0, 1.0, 5)), Error);
}

TEST_CASE("default benchmark grid") {
  const auto cells = default_distortion_grid();
  REQUIRE(cells.size() == 9);
  CHECK(cells.front().removal == 0.0);
  CHECK(cells.front().noise_K == 0.1);
  CHECK(cells.back().removal == 0.2);
  CHECK(cells.back().noise_K == 0.3);
  BenchConfig bad;
  bad.frames = {5.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("small benchmark run is reproducible and isolates failing cells") {
  BenchConfig cfg;
  cfg.schedule = {3.5, 4.0, 3000};
  cfg.cells = {{0.1, 0.1}, {0.1, 0.3}};
  cfg.frames = {100.0, 200.0};
  cfg.omega_units_max = 5.0;
  const BenchmarkReport a = run_benchmark(cfg);
  cfg.workers = 2;
  const BenchmarkReport b = run_benchmark(cfg);
  REQUIRE(a.cells.size() == 2);
  for (std::size_t c = 0; c < 2; ++c) {
    REQUIRE(!a.cells[c].error);
    REQUIRE(a.cells[c].frames.size() == 2);
    CHECK(a.cells[c].omegas.size() == 5);
    for (std::size_t f = 0; f < 2; ++f) {
      const auto& fa = a.cells[c].frames[f];
      CHECK(fa.e_tacts >= 0.0);
      CHECK(fa.e_tacts <= 1.0);
      CHECK(fa.e_tacts == b.cells[c].frames[f].e_tacts);
      CHECK(fa.e_interp == b.cells[c].frames[f].e_interp);
      CHECK(fa.e_members.size() == 5);
    }
  }
  CHECK(a.x0 > 0.1);
  CHECK(a.x0 < 0.9);
  CHECK(!std::isnan(a.mean_error(0, true)));

  // A grid of omegas wider than the data span fails only its own cell.
  cfg.omegas = {2000.0};
  cfg.cells = {{0.0, 0.1}};
  const BenchmarkReport failed = run_benchmark(cfg);
  CHECK(failed.cells[0].error.has_value());
  CHECK(std::isnan(failed.overall_mean_error(true)));
}
