#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tacts/kernels.hpp"

using namespace tacts;
using namespace tacts::kernels;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("kernel pair costs: avx2 matches scalar bit for bit") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 101u}) {
    const auto ts = random_values(rng, n), xs = random_values(rng, n);
    std::vector<double> a(n), b(n);
    scalar::pair_costs(0.3, -1.2, ts, xs, 1.7, 0.4, a);
    avx2::pair_costs(0.3, -1.2, ts, xs, 1.7, 0.4, b);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(a[i] == b[i]);
      CHECK(a[i] == 1.7 * std::abs(0.3 - ts[i]) + 0.4 * std::abs(-1.2 - xs[i]));
    }
  }
}

TEST_CASE("kernel diagonal masks: avx2 matches scalar") {
  std::mt19937_64 rng(12);
  for (std::size_t n : {2u, 5u, 63u, 64u, 65u, 130u, 257u}) {
    auto x = random_values(rng, n);
    x[n / 2] = NAN;  // gap-masked points never recur
    for (std::size_t k = 0; k < n; k += 3) {
      std::vector<std::uint64_t> a(words_for(n), ~0ULL), b(words_for(n), ~0ULL);
      scalar::diagonal_mask(x, k, 0.4, a);
      avx2::diagonal_mask(x, k, 0.4, b);
      CHECK(a == b);
      for (std::size_t i = 0; i + k < n; ++i) {
        const bool expect = std::abs(x[i] - x[i + k]) <= 0.4;
        CHECK(((a[i / 64] >> (i % 64)) & 1) == (expect ? 1u : 0u));
      }
      for (std::size_t i = n - k; i < words_for(n - k) * 64; ++i) CHECK(((a[i / 64] >> (i % 64)) & 1) == 0);
    }
  }
}

TEST_CASE("kernel dispatch honours the forced variant") {
  const Isa before = active_isa();
  set_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  if (isa_supported(Isa::avx2)) {
    set_isa(Isa::avx2);
    CHECK(active_isa() == Isa::avx2);
  } else {
    CHECK_THROWS(set_isa(Isa::avx2));
  }
  set_isa(before);
}

TEST_CASE("kernel run scanning over bit ranges") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 300;
    std::vector<std::uint64_t> bits(words_for(n), 0);
    std::vector<int> ref(n);
    for (std::size_t i = 0; i < n; ++i) {
      ref[i] = coin(rng);
      if (ref[i]) bits[i / 64] |= 1ULL << (i % 64);
    }
    const std::size_t a = rng() % (n + 1);
    const std::size_t c = a + rng() % (n - a + 1);
    std::vector<std::pair<std::size_t, std::size_t>> got, want;
    for_each_run_in(bits, a, c, [&](std::size_t s, std::size_t l) { got.emplace_back(s, l); });
    for (std::size_t i = a; i < c;) {
      if (!ref[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < c && ref[j]) ++j;
      want.emplace_back(i, j - i);
      i = j;
    }
    CHECK(got == want);
  }
}
