#include <cmath>

#include "tacts/kernels.hpp"

namespace tacts::kernels::scalar {

void pair_costs(double t, double x, std::span<const double> ts, std::span<const double> xs,
                double lambda_t, double lambda_x, std::span<double> out) {
  for (std::size_t j = 0; j < ts.size(); ++j) {
    out[j] = lambda_t * std::abs(t - ts[j]) + lambda_x * std::abs(x - xs[j]);
  }
}

void diagonal_mask(std::span<const double> x, std::size_t offset, double eps,
                   std::span<std::uint64_t> bits) {
  const std::size_t len = x.size() - offset;
  const std::size_t nwords = words_for(len);
  for (std::size_t w = 0; w < nwords; ++w) bits[w] = 0;
  for (std::size_t i = 0; i < len; ++i) {
    if (std::abs(x[i] - x[i + offset]) <= eps) bits[i / 64] |= std::uint64_t{1} << (i % 64);
  }
}

}  // namespace tacts::kernels::scalar
