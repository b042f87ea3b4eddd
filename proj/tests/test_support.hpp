#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "tacts/series.hpp"
#include "tacts/transform_cost.hpp"

namespace test_support {

inline tacts::Segment random_segment(std::mt19937_64& rng, std::size_t n, double width) {
  std::uniform_real_distribution<double> t(0.0, width), x(-3.0, 3.0);
  tacts::Segment s;
  s.rel_times.resize(n);
  s.amplitudes.resize(n);
  for (auto& v : s.rel_times) v = t(rng);
  std::sort(s.rel_times.begin(), s.rel_times.end());
  for (auto& v : s.amplitudes) v = x(rng);
  return s;
}

// Independent enumeration of every partial bijection between the two
// segments, written directly from the cost definition.
inline double oracle_cost(const tacts::Segment& a, const tacts::Segment& b,
                          const tacts::CostParams& p) {
  const std::size_t n = a.size(), m = b.size();
  if (n + m == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> match(n, -1);
  std::vector<char> used(m, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if (match[k] < 0) continue;
        const auto j = static_cast<std::size_t>(match[k]);
        sum += p.lambda_t * std::abs(a.rel_times[k] - b.rel_times[j]) +
               p.lambda_x * std::abs(a.amplitudes[k] - b.amplitudes[j]);
        ++pairs;
      }
      const double unmatched = static_cast<double>(n + m - 2 * pairs);
      best = std::min(best, (p.lambda * unmatched + sum) / static_cast<double>(n + m));
      return;
    }
    match[i] = -1;
    self(self, i + 1);
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      match[i] = static_cast<int>(j);
      self(self, i + 1);
      used[j] = 0;
    }
    match[i] = -1;
  };
  rec(rec, 0);
  return best;
}

inline tacts::IrregularSeries jittered_series(std::mt19937_64& rng, std::size_t n,
                                              double (*f)(double)) {
  std::uniform_real_distribution<double> dt(0.5, 1.5);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> t(n), x(n);
  double now = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    now += dt(rng);
    t[i] = now;
    x[i] = f(now) + noise(rng);
  }
  return tacts::IrregularSeries(std::move(t), std::move(x));
}

}  // namespace test_support
