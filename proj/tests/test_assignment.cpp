#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tacts/assignment.hpp"

using namespace tacts;

namespace {

// Minimum over every injective partial map using exactly k pairs.
std::vector<double> brute_k_costs(const std::vector<double>& c, std::size_t rows, std::size_t cols) {
  std::vector<double> best(std::min(rows, cols) + 1, std::numeric_limits<double>::infinity());
  std::vector<char> used(cols, 0);
  auto rec = [&](auto&& self, std::size_t i, std::size_t k, double sum) -> void {
    if (i == rows) {
      best[k] = std::min(best[k], sum);
      return;
    }
    self(self, i + 1, k, sum);
    for (std::size_t j = 0; j < cols; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, k + 1, sum + c[i * cols + j]);
      used[j] = 0;
    }
  };
  rec(rec, 0, 0, 0.0);
  return best;
}

}  // namespace

TEST_CASE("assignment matches exhaustive search") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + rng() % 5;
    const std::size_t cols = rows + rng() % 3;
    std::vector<double> c(rows * cols);
    for (auto& v : c) v = u(rng);
    const auto cols_for_row = min_cost_assignment(c, rows, cols);
    double got = 0.0;
    std::vector<char> seen(cols, 0);
    for (std::size_t i = 0; i < rows; ++i) {
      REQUIRE(cols_for_row[i] < cols);
      CHECK(!seen[cols_for_row[i]]);
      seen[cols_for_row[i]] = 1;
      got += c[i * cols + cols_for_row[i]];
    }
    const auto brute = brute_k_costs(c, rows, cols);
    CHECK(got == doctest::Approx(brute[rows]).epsilon(1e-12));

    const auto profile = k_matching_costs(c, rows, cols);
    REQUIRE(profile.size() == brute.size());
    for (std::size_t k = 0; k < brute.size(); ++k) {
      CHECK(profile[k] == doctest::Approx(brute[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("k-matching profile is convex") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 8;
    std::vector<double> c(rows * cols);
    for (auto& v : c) v = u(rng);
    const auto d = k_matching_costs(c, rows, cols);
    for (std::size_t k = 1; k + 1 < d.size(); ++k) {
      CHECK(d[k + 1] - d[k] >= d[k] - d[k - 1] - 1e-12);
    }
  }
}
