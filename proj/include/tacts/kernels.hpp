#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation and, where the target supports it, an AVX2 variant that
// must produce bit-identical output. The dispatching entry points select
// the variant at runtime from CPU detection, overridable for testing.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace tacts::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best variant the running CPU (and this build) supports.
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
/// Forces a variant; throws if the CPU or build cannot run it.
void set_isa(Isa isa);
bool isa_supported(Isa isa) noexcept;

/// Number of 64-bit words holding a bitset of `bits` entries.
constexpr std::size_t words_for(std::size_t bits) noexcept { return (bits + 63) / 64; }

// out[j] = lambda_t * |t - ts[j]| + lambda_x * |x - xs[j]|
void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out);

// Bit i of `bits` (LSB first) = |x[i] - x[i + offset]| <= eps, for
// i < x.size() - offset. Tail bits of the last word are cleared.
void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits);

namespace scalar {
void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out);
void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits);
}  // namespace scalar

namespace avx2 {
bool compiled() noexcept;
void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out);
void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits);
}  // namespace avx2

/// Calls `fn(start, length)` for every maximal run of set bits in the bit
/// range [begin, end). Runs are clipped to the range; bits outside it are
/// ignored.
template <typename Fn>
void for_each_run_in(std::span<const std::uint64_t> bits, std::size_t begin, std::size_t end,
                     Fn&& fn);

/// for_each_run_in over [0, nbits).
template <typename Fn>
void for_each_run(std::span<const std::uint64_t> bits, std::size_t nbits, Fn&& fn) {
  for_each_run_in(bits, 0, nbits, std::forward<Fn>(fn));
}

template <typename Fn>
void for_each_run_in(std::span<const std::uint64_t> bits, std::size_t begin, std::size_t end,
                     Fn&& fn) {
  if (end <= begin) return;
  std::size_t run_start = 0;
  bool in_run = false;
  const std::size_t first_word = begin / 64;
  const std::size_t last_word = (end - 1) / 64;
  for (std::size_t w = first_word; w <= last_word; ++w) {
    std::uint64_t word = bits[w];
    if (w == first_word) word &= ~std::uint64_t{0} << (begin % 64);
    if (w == last_word && end % 64 != 0) word &= ~std::uint64_t{0} >> (64 - end % 64);
    std::size_t bit = 0;
    while (bit < 64) {
      const std::uint64_t rest = word >> bit;
      if (in_run) {
        const auto ones = static_cast<std::size_t>(std::countr_one(rest));
        if (bit + ones >= 64) break;
        bit += ones;
        fn(run_start, w * 64 + bit - run_start);
        in_run = false;
      } else {
        if (rest == 0) break;
        bit += static_cast<std::size_t>(std::countr_zero(rest));
        run_start = w * 64 + bit;
        in_run = true;
      }
    }
  }
  if (in_run) fn(run_start, end - run_start);
}

}  // namespace tacts::kernels
