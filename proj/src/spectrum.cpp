#include "tacts/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tacts/parallel.hpp"

namespace tacts {

std::size_t CostSeries::gap_count() const noexcept {
  return static_cast<std::size_t>(std::count(gap_mask.begin(), gap_mask.end(), 1));
}

std::size_t CostSeries::gap_runs() const noexcept {
  std::size_t runs = 0;
  for (std::size_t i = 0; i < gap_mask.size(); ++i) {
    if (gap_mask[i] && (i == 0 || !gap_mask[i - 1])) ++runs;
  }
  return runs;
}

CostSeries tacts_series(const IrregularSeries& series, const RegularTimeline& tl, double omega,
                        const TactsOptions& options) {
  if (!(omega > 0.0) || !std::isfinite(omega)) fail(Errc::config, "omega must be positive");
  double lambda_x = 0.0;
  try {
    lambda_x = calibrate_lambda_x(series, tl, omega);
  } catch (const Error& e) {
    if (e.code() == Errc::all_gaps) fail(Errc::empty_series, "every timeline point is a gap");
    throw;
  }
  const double lambda_t = calibrate_lambda_t(series, omega);
  const auto landscape =
      CostLandscape::build(series, tl, omega, lambda_t, lambda_x, options.order_preserving);

  double lambda = 0.0;
  double ks = std::numeric_limits<double>::quiet_NaN();
  if (options.fixed_lambda) {
    lambda = *options.fixed_lambda;
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(Errc::config, "lambda must be positive");
    try {
      ks = ks_distance_to_gaussian(landscape.filtered_costs(lambda));
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_distribution) throw;
    }
  } else {
    const auto grid =
        options.lambda_grid.empty() ? default_lambda_grid(landscape) : options.lambda_grid;
    const LambdaChoice choice = optimize_lambda(landscape, grid);
    lambda = choice.lambda;
    ks = choice.ks;
  }

  CostSeries out{tl, landscape.costs(lambda),
                 std::vector<std::uint8_t>(landscape.gap_mask().begin(), landscape.gap_mask().end()),
                 CostParams{lambda, lambda_t, lambda_x, omega}, ks};
  return out;
}

OmegaGrid choose_omega_grid(const SamplingStats& stats, double n_min, double n_max,
                            double step_in_units) {
  if (!(stats.mean_dt > 0.0) || !std::isfinite(stats.mean_dt)) {
    fail(Errc::invalid_input, "mean sampling step must be positive");
  }
  if (!(step_in_units > 0.0)) fail(Errc::config, "omega grid step must be positive");
  if (!(n_min > 0.0) || n_max < n_min) fail(Errc::config, "omega grid needs 0 < n_min <= n_max");
  const auto count =
      static_cast<std::size_t>(std::floor((n_max - n_min) / step_in_units + 1e-9)) + 1;
  OmegaGrid grid;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = n_min + static_cast<double>(i) * step_in_units;
    grid.units.push_back(u);
    grid.omegas.push_back(u * stats.mean_dt);
  }
  grid.min_period = grid.omegas.front();
  grid.max_period = grid.omegas.back();
  return grid;
}

SpectrumBuild build_spectrum(const IrregularSeries& series, const RegularTimeline& tl,
                             const std::vector<double>& omegas, const SpectrumOptions& options) {
  if (omegas.empty()) fail(Errc::config, "omega grid is empty");
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (!(omegas[i] > omegas[i - 1])) fail(Errc::config, "omega grid must be strictly increasing");
  }

  std::vector<std::optional<CostSeries>> results(omegas.size());
  std::vector<std::optional<MemberFailure>> errors(omegas.size());
  parallel_for(omegas.size(), options.workers, [&](std::size_t i) {
    try {
      results[i] = tacts_series(series, tl, omegas[i], options.tacts);
    } catch (const Error& e) {
      errors[i] = MemberFailure{omegas[i], e.code(), e.what()};
    }
  });

  SpectrumBuild out{Spectrum{tl, {}, {}, series.size() >= 2 ? sampling_stats(series) : SamplingStats{}},
                    {}};
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (results[i]) {
      out.spectrum.members.push_back(std::move(*results[i]));
      out.spectrum.omegas.push_back(omegas[i]);
    } else {
      out.failures.push_back(std::move(*errors[i]));
    }
  }
  if (out.spectrum.members.empty()) {
    std::ostringstream msg;
    msg << "no spectrum member could be built";
    if (!out.failures.empty()) msg << " (first failure: " << out.failures.front().message << ")";
    fail(Errc::empty_series, msg.str());
  }
  return out;
}

}  // namespace tacts
