#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tacts/error.hpp"
#include "tacts/series.hpp"
#include "tacts/transform_cost.hpp"

namespace tacts {

/// One TACTS member: costs on a regular timeline, NaN where gap-masked.
struct CostSeries {
  RegularTimeline timeline;
  std::vector<double> costs;
  std::vector<std::uint8_t> gap_mask;
  CostParams params;
  double ks_stat = 0.0;

  RegularSeriesView view() const { return {timeline, costs, gap_mask}; }
  std::size_t gap_count() const noexcept;
  /// Number of maximal runs of consecutive gap-masked points.
  std::size_t gap_runs() const noexcept;
};

struct TactsOptions {
  std::optional<double> fixed_lambda;
  std::vector<double> lambda_grid;  // empty: default grid per omega
  bool order_preserving = false;    // approximate DP costs instead of the exact solve
};

CostSeries tacts_series(const IrregularSeries& series, const RegularTimeline& tl, double omega,
                        const TactsOptions& options = {});

struct OmegaGrid {
  std::vector<double> omegas;
  std::vector<double> units;  // omegas in multiples of the mean sampling step
  double min_period = 0.0;
  double max_period = 0.0;
};

OmegaGrid choose_omega_grid(const SamplingStats& stats, double n_min, double n_max,
                            double step_in_units = 0.5);

struct Spectrum {
  RegularTimeline timeline;
  std::vector<CostSeries> members;
  std::vector<double> omegas;
  SamplingStats source_stats;

  std::size_t size() const noexcept { return members.size(); }
};

struct MemberFailure {
  double omega = 0.0;
  Errc code = Errc::numerical;
  std::string message;
};

struct SpectrumBuild {
  Spectrum spectrum;
  std::vector<MemberFailure> failures;  // dropped members, in omega order
};

struct SpectrumOptions {
  TactsOptions tacts;
  std::size_t workers = 1;
};

/// Members that fail calibration are dropped and reported; throws only when
/// every member fails.
SpectrumBuild build_spectrum(const IrregularSeries& series, const RegularTimeline& tl,
                             const std::vector<double>& omegas,
                             const SpectrumOptions& options = {});

}  // namespace tacts
