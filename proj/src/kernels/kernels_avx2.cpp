// Compiled with -mavx2 on x86-64; only entered after a runtime CPU check.

#include <cmath>

#include "tacts/kernels.hpp"

#if defined(TACTS_HAVE_AVX2_TU) && defined(__AVX2__)
#include <immintrin.h>
#define TACTS_AVX2_BODY 1
#else
#define TACTS_AVX2_BODY 0
#endif

namespace tacts::kernels::avx2 {

#if TACTS_AVX2_BODY

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

}  // namespace

bool compiled() noexcept { return true; }

void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out) {
  const std::size_t n = ts.size();
  const __m256d vt = _mm256_set1_pd(t);
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d lt = _mm256_set1_pd(lambda_t);
  const __m256d lx = _mm256_set1_pd(lambda_x);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dt = abs_pd(_mm256_sub_pd(vt, _mm256_loadu_pd(ts.data() + j)));
    const __m256d dx = abs_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(xs.data() + j)));
    _mm256_storeu_pd(out.data() + j, _mm256_add_pd(_mm256_mul_pd(lt, dt), _mm256_mul_pd(lx, dx)));
  }
  for (; j < n; ++j) {
    out[j] = lambda_t * std::abs(t - ts[j]) + lambda_x * std::abs(x - xs[j]);
  }
}

void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits) {
  const std::size_t len = x.size() - offset;
  const std::size_t nwords = words_for(len);
  const double* a = x.data();
  const double* b = x.data() + offset;
  const __m256d veps = _mm256_set1_pd(eps);
  for (std::size_t w = 0; w < nwords; ++w) {
    const std::size_t base = w * 64;
    const std::size_t stop = std::min(len, base + 64);
    std::uint64_t word = 0;
    std::size_t i = base;
    for (; i + 4 <= stop; i += 4) {
      const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
      const int m = _mm256_movemask_pd(_mm256_cmp_pd(d, veps, _CMP_LE_OQ));
      word |= static_cast<std::uint64_t>(m) << (i - base);
    }
    for (; i < stop; ++i) {
      if (std::abs(a[i] - b[i]) <= eps) word |= std::uint64_t{1} << (i - base);
    }
    bits[w] = word;
  }
}

#else

bool compiled() noexcept { return false; }

void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out) {
  scalar::pair_costs(t, x, ts, xs, lambda_t, lambda_x, out);
}

void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits) {
  scalar::diagonal_mask(x, offset, eps, bits);
}

#endif

}  // namespace tacts::kernels::avx2
