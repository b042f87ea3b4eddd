#include <doctest.h>

#include <cmath>
#include <random>

#include "tacts/error.hpp"
#include "tacts/rqa.hpp"

using namespace tacts;

namespace {

std::vector<double> noise(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("recurrence matrix invariants") {
  std::mt19937_64 rng(41);
  const auto x = noise(rng, 30);
  const auto rm = recurrence_matrix(x, 0.5);
  for (std::size_t i = 0; i < rm.size; ++i) {
    CHECK(rm.at(i, i) == 1);
    for (std::size_t j = 0; j < rm.size; ++j) CHECK(rm.at(i, j) == rm.at(j, i));
  }
  auto shifted = x;
  for (auto& v : shifted) v += 7.0;
  CHECK(recurrence_matrix(shifted, 0.5).cells == rm.cells);
  const std::vector<double> apart{0.0, 10.0};
  CHECK(recurrence_matrix(apart, 1.0).recurrence_count() == 2);
}

TEST_CASE("diagonal histograms of small matrices") {
  const std::vector<double> id{0, 10, 20, 30, 40};
  const auto h1 = diagonal_histogram(recurrence_matrix(id, 1.0));
  CHECK(h1.count(5) == 1);
  CHECK(h1.line_count() == 1);

  const std::vector<double> flat{1, 1, 1};
  const auto h2 = diagonal_histogram(recurrence_matrix(flat, 0.0));
  CHECK(h2.count(3) == 1);
  CHECK(h2.count(2) == 2);
  CHECK(h2.count(1) == 2);
  CHECK(determinism(h2, 2) == doctest::Approx(7.0 / 9.0));

  const std::vector<double> x{0, 0, 1, 0, 0};
  const auto h3 = diagonal_histogram(recurrence_matrix(x, 0.5));
  CHECK(h3.total_points() == 17);
  CHECK(h3.points_in_lines(2) == 9);
  CHECK(determinism(h3, 2) == 9.0 / 17.0);
  CHECK(window_histogram(x, 0.5).counts == h3.counts);

  DiagonalHistogram iso;
  iso.counts = {0, 7};
  CHECK(determinism(iso, 2) == 0.0);
  CHECK_THROWS_AS(determinism(DiagonalHistogram{}, 2), Error);
}

TEST_CASE("kernel histograms equal the dense reference and conserve points") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = noise(rng, 2 + rng() % 150);
    const double eps = 0.05 + 0.5 * static_cast<double>(rng() % 100) / 100.0;
    const auto rm = recurrence_matrix(x, eps);
    const auto dense = diagonal_histogram(rm);
    CHECK(dense.total_points() == rm.recurrence_count());
    CHECK(window_histogram(x, eps).counts == dense.counts);
    const LineCounts lc = window_line_counts(x, eps, 2);
    CHECK(lc.recurrent == rm.recurrence_count());
    CHECK(lc.in_lines == dense.points_in_lines(2));

    const auto no_loi = diagonal_histogram(rm, false);
    CHECK(no_loi.total_points() == rm.recurrence_count() - x.size());
    CHECK(window_histogram(x, eps, false).counts == no_loi.counts);
  }
}

TEST_CASE("det series on synthetic inputs") {
  const RegularTimeline tl(0.0, 1.0, 200);
  std::vector<double> flat(200, 3.0);
  std::vector<std::uint8_t> none(200, 0);
  const RegularTimeline rec(0.0, 5.0, 41);
  DetOptions o;
  o.frame = 20.0;
  const DetSeries d = det_series({tl, flat, none}, rec, o);
  // 19 points per window; only the two corner cells are isolated.
  for (std::size_t r = 0; r < rec.count(); ++r) {
    if (d.valid[r]) CHECK(d.values[r] == (361.0 - 2.0) / 361.0);
  }
  // Windows must lie inside [t0 - step, t0 + count * step].
  CHECK(d.valid[0] == 0);
  CHECK(d.valid[1] == 0);
  CHECK(d.valid[2] == 1);
  CHECK(d.valid[38] == 1);
  CHECK(d.valid[39] == 0);
  CHECK(d.complete_windows == d.valid_count());

  std::mt19937_64 rng(43);
  auto x = noise(rng, 200);
  o.eps_fraction = 1e3;
  const DetSeries sat = det_series({tl, x, none}, rec, o);
  for (std::size_t r = 0; r < rec.count(); ++r) {
    if (sat.valid[r]) CHECK(sat.values[r] == (361.0 - 2.0) / 361.0);
  }

  CHECK_THROWS_AS(det_series({tl, x, none}, rec, DetOptions{4.0}), Error);
}

TEST_CASE("det windows touching gaps are invalid") {
  const RegularTimeline tl(0.0, 1.0, 300);
  std::mt19937_64 rng(44);
  auto x = noise(rng, 300);
  std::vector<std::uint8_t> gaps(300, 0);
  for (std::size_t i = 140; i < 150; ++i) {
    gaps[i] = 1;
    x[i] = NAN;
  }
  const RegularTimeline rec(0.0, 2.0, 150);
  DetOptions o;
  o.frame = 30.0;
  const DetSeries d = det_series({tl, x, gaps}, rec, o);
  for (std::size_t r = 0; r < rec.count(); ++r) {
    const double t = rec.at(r);
    const bool touches = t + 15.0 > 140.0 && t - 15.0 < 149.0;
    if (touches) CHECK(d.valid[r] == 0);
  }
  CHECK(d.valid_count() < d.complete_windows);
  std::vector<double> kept;
  for (std::size_t i = 0; i < 300; ++i) {
    if (!gaps[i]) kept.push_back(x[i]);
  }
  CHECK(d.eps == doctest::Approx(0.1 * moments(kept).std));
}

TEST_CASE("det series agrees with direct window evaluation") {
  std::mt19937_64 rng(45);
  const RegularTimeline tl(3.0, 0.5, 700);
  auto x = noise(rng, 700);
  for (std::size_t i = 1; i < x.size(); ++i) x[i] = 0.8 * x[i - 1] + 0.2 * x[i];
  std::vector<std::uint8_t> gaps(700, 0);
  gaps[400] = 1;
  x[400] = NAN;
  const RegularTimeline rec(3.0, 1.5, 230);
  for (bool hist : {false, true}) {
    for (std::size_t workers : {1u, 3u}) {
      DetOptions o;
      o.frame = 41.0;
      o.l_min = 3;
      o.keep_histograms = hist;
      o.workers = workers;
      const DetSeries d = det_series({tl, x, gaps}, rec, o);
      for (std::size_t r = 0; r < rec.count(); ++r) {
        if (!d.valid[r]) continue;
        const double t = rec.at(r);
        std::vector<double> w;
        for (std::size_t i = 0; i < tl.count(); ++i) {
          if (tl.at(i) > t - 20.5 && tl.at(i) < t + 20.5) w.push_back(x[i]);
        }
        const auto h = diagonal_histogram(recurrence_matrix(w, d.eps));
        CHECK(d.values[r] == determinism(h, 3));
        if (hist) CHECK(d.histograms[r].counts == h.counts);
      }
    }
  }
}

TEST_CASE("sdet averages valid members") {
  const RegularTimeline rec(0.0, 1.0, 3);
  auto member = [&](std::vector<double> v, std::vector<std::uint8_t> ok) {
    DetSeries d{rec, std::move(v), std::move(ok), 10.0, 0.1, 0.1, 2, 3, {}};
    return d;
  };
  std::vector<DetSeries> ms{member({0.2, 0.5, NAN}, {1, 1, 0}), member({0.4, NAN, NAN}, {1, 0, 0}),
                            member({0.6, 0.7, NAN}, {1, 1, 0})};
  const SDetSeries s = sdet(ms);
  CHECK(s.values[0] == doctest::Approx(0.4));
  CHECK(s.values[1] == doctest::Approx(0.6));
  CHECK(s.member_count[1] == 2);
  CHECK(s.valid[2] == 0);
  CHECK(std::isnan(s.values[2]));
  const SDetSeries one = sdet(std::span<const DetSeries>(ms.data(), 1));
  CHECK(one.values[0] == 0.2);
  std::vector<DetSeries> bad{ms[0], member({0.1}, {1})};
  bad[1].rec_timeline = RegularTimeline(0.0, 1.0, 1);
  CHECK_THROWS_AS(sdet(bad), Error);
}

TEST_CASE("quantiles and significance flags") {
  const std::vector<double> s{1, 2, 3, 4, 5};
  CHECK(quantile_sorted(s, 0.0) == 1);
  CHECK(quantile_sorted(s, 1.0) == 5);
  CHECK(quantile_sorted(s, 0.1) == doctest::Approx(1.4));
  CHECK(quantile_sorted(s, 0.5) == 3);

  const RegularTimeline rec(0.0, 1.0, 4);
  SDetSeries sd{rec, {0.1, 0.5, 0.9, 0.3}, {1, 1, 1, 1}, {1, 1, 1, 1}, {}, {}, {}};
  BootstrapBand band;
  band.ci_low = {0.2, 0.2, 0.2, 0.3};
  band.ci_high = {0.8, 0.8, 0.8, 0.8};
  attach_band(sd, band);
  CHECK(sd.flags[0] == Significance::low);
  CHECK(sd.flags[1] == Significance::none);
  CHECK(sd.flags[2] == Significance::high);
  CHECK(sd.flags[3] == Significance::none);  // equality stays inside the band
}

TEST_CASE("bootstrap band") {
  std::mt19937_64 rng(46);
  const RegularTimeline tl(0.0, 1.0, 400);
  const RegularTimeline rec(0.0, 4.0, 100);
  std::vector<std::uint8_t> none(400, 0);
  DetOptions o;
  o.frame = 40.0;
  o.keep_histograms = true;

  std::vector<double> flat(400, 1.0);
  const DetSeries dflat = det_series({tl, flat, none}, rec, o);
  BootstrapOptions bo;
  bo.n_surrogates = 200;
  const BootstrapBand flat_band = bootstrap_band(std::span<const DetSeries>(&dflat, 1), bo);
  CHECK(flat_band.members[0].low <= flat_band.members[0].high);
  CHECK(flat_band.members[0].low >= 0.0);
  CHECK(flat_band.members[0].high <= 1.0);

  const auto x = noise(rng, 400);
  const DetSeries d = det_series({tl, x, none}, rec, o);
  bo.seed = 9;
  const BootstrapBand wide = bootstrap_band(std::span<const DetSeries>(&d, 1), bo);
  bo.q_low = 0.25;
  bo.q_high = 0.75;
  const BootstrapBand inner = bootstrap_band(std::span<const DetSeries>(&d, 1), bo);
  CHECK(inner.members[0].low >= wide.members[0].low);
  CHECK(inner.members[0].high <= wide.members[0].high);
  CHECK(wide.members[0].low < wide.members[0].high);
  for (std::size_t r = 0; r < rec.count(); ++r) {
    if (d.valid[r]) {
      CHECK(wide.ci_low[r] == wide.members[0].low);
    } else {
      CHECK(std::isnan(wide.ci_low[r]));
    }
  }
  const BootstrapBand again = bootstrap_band(std::span<const DetSeries>(&d, 1), bo);
  CHECK(again.members[0].low == inner.members[0].low);

  bo.n_surrogates = 50;
  CHECK_THROWS_AS(bootstrap_band(std::span<const DetSeries>(&d, 1), bo), Error);
  DetOptions plain = o;
  plain.keep_histograms = false;
  const DetSeries nohist = det_series({tl, x, none}, rec, plain);
  bo.n_surrogates = 200;
  CHECK_THROWS_AS(bootstrap_band(std::span<const DetSeries>(&nohist, 1), bo), Error);
}
