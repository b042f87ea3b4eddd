#include <atomic>
#include <cstdlib>
#include <string>

#include "tacts/error.hpp"
#include "tacts/kernels.hpp"

namespace tacts::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  // TACTS_ISA=scalar pins the reference kernels for a whole process.
  if (const char* env = std::getenv("TACTS_ISA")) {
    if (std::string(env) == "scalar") return Isa::scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
  return avx2::compiled() && cpu_has_avx2();
}

Isa detected_isa() noexcept { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_supported(isa)) {
    fail(Errc::config, "kernel variant " + std::string(to_string(isa)) + " not supported here");
  }
  current().store(isa, std::memory_order_relaxed);
}

void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out) {
  if (active_isa() == Isa::avx2) {
    avx2::pair_costs(t, x, ts, xs, lambda_t, lambda_x, out);
  } else {
    scalar::pair_costs(t, x, ts, xs, lambda_t, lambda_x, out);
  }
}

void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits) {
  if (active_isa() == Isa::avx2) {
    avx2::diagonal_mask(x, offset, eps, bits);
  } else {
    scalar::diagonal_mask(x, offset, eps, bits);
  }
}

}  // namespace tacts::kernels
