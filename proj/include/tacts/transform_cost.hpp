#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tacts/series.hpp"

namespace tacts {

/// Prices of the three transformation operations plus the segment width.
struct CostParams {
  double lambda = 1.0;    // ignore (create/delete) one point
  double lambda_t = 1.0;  // per unit of time shift
  double lambda_x = 1.0;  // per unit of amplitude change
  double omega = 1.0;     // segment width

  void validate() const;
};

struct Point {
  double time = 0.0;   // relative time within its segment
  double value = 0.0;
};

double point_cost(Point a, Point b, const CostParams& params) noexcept;

/// Pairs (index in first segment, index in second segment); injective on both sides.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct SegmentCostResult {
  double cost = 0.0;  // normalized by the number of points in both segments
  Matching matching;
  std::size_t matched_count = 0;
};

/// Exact minimum normalized transformation cost over all partial bijections.
///
/// A pair whose point cost exceeds 2*lambda is never worth matching, so the
/// pair costs are capped there and the problem becomes a square-ish
/// assignment where an entry at the cap means "ignore both points".
SegmentCostResult segment_cost(const Segment& sa, const Segment& sb, const CostParams& params);

/// Exhaustive enumeration of every partial bijection. Limited to 6 points per side.
SegmentCostResult brute_force_segment_cost(const Segment& sa, const Segment& sb,
                                           const CostParams& params);

/// Order-preserving edit-distance recursion. Only an upper bound on
/// segment_cost: it cannot represent crossing matchings.
double order_preserving_cost(const Segment& sa, const Segment& sb, const CostParams& params);

/// Optimal matched cost for every matching size k; the normalized cost for
/// any ignore price follows in O(k) without another solve.
struct CostProfile {
  std::size_t total_points = 0;
  std::vector<double> matched_cost;  // index k = pairs matched

  double evaluate(double lambda) const noexcept;
};

CostProfile segment_cost_profile(const Segment& sa, const Segment& sb, double lambda_t,
                                 double lambda_x);

double calibrate_lambda_x(const IrregularSeries& series, const RegularTimeline& tl, double omega);
double calibrate_lambda_t(const IrregularSeries& series, double omega);

/// Kolmogorov-Smirnov distance between the sample and a Gaussian with the
/// sample's mean and population standard deviation.
double ks_distance_to_gaussian(std::span<const double> samples);

/// Per-timeline-point segment profiles for one omega and fixed unit costs.
/// Evaluating a cost series for a new ignore price is then cheap.
class CostLandscape {
 public:
  static CostLandscape build(const IrregularSeries& series, const RegularTimeline& tl,
                             double omega, double lambda_t, double lambda_x,
                             bool order_preserving = false);

  const RegularTimeline& timeline() const noexcept { return timeline_; }
  std::span<const std::uint8_t> gap_mask() const noexcept { return gap_mask_; }
  std::size_t gap_count() const noexcept;
  double omega() const noexcept { return omega_; }
  double lambda_t() const noexcept { return lambda_t_; }
  double lambda_x() const noexcept { return lambda_x_; }

  /// Cost per timeline point; NaN at gaps.
  std::vector<double> costs(double lambda) const;
  /// Non-gap costs in timeline order.
  std::vector<double> filtered_costs(double lambda) const;

  /// Mean uncapped point cost of pairing each point of the earlier segment
  /// with the nearest-in-time point of the later one.
  double mean_naive_pair_cost() const noexcept { return mean_naive_pair_cost_; }

 private:
  explicit CostLandscape(const RegularTimeline& tl) : timeline_(tl) {}

  double cost_at(std::size_t slot, double lambda) const;

  RegularTimeline timeline_;
  double omega_ = 0.0;
  double lambda_t_ = 0.0;
  double lambda_x_ = 0.0;
  bool order_preserving_ = false;
  double mean_naive_pair_cost_ = 0.0;
  std::vector<std::uint8_t> gap_mask_;
  // Flattened per-slot data; slot = non-gap timeline point.
  std::vector<std::size_t> slot_total_;
  std::vector<std::size_t> slot_offset_;
  std::vector<double> profile_data_;
  std::vector<Segment> before_, after_;  // order-preserving mode only
};

/// 60 candidates linearly spaced from 0.05 to 6 times the landscape's naive pair cost.
std::vector<double> default_lambda_grid(const CostLandscape& landscape);

struct LambdaChoice {
  double lambda = 0.0;
  double ks = 0.0;
};

LambdaChoice optimize_lambda(const CostLandscape& landscape, std::span<const double> grid);
LambdaChoice optimize_lambda(const IrregularSeries& series, const RegularTimeline& tl,
                             double omega, std::span<const double> grid);

}  // namespace tacts
