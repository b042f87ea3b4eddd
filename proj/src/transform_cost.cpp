#include "tacts/transform_cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tacts/assignment.hpp"
#include "tacts/error.hpp"
#include "tacts/kernels.hpp"

namespace tacts {

namespace {

void check_finite(const Segment& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.rel_times[i]) || !std::isfinite(s.amplitudes[i])) {
      fail(Errc::invalid_input, "segment contains a non-finite value");
    }
  }
}

void check_pair(const Segment& sa, const Segment& sb) {
  if (sa.empty() && sb.empty()) fail(Errc::gap, "both segments are empty");
  check_finite(sa);
  check_finite(sb);
}

// Row-major n x m matrix of point costs between sa (rows) and sb (columns).
void fill_pair_costs(const Segment& sa, const Segment& sb, double lambda_t, double lambda_x,
                     std::vector<double>& out) {
  const std::size_t n = sa.size(), m = sb.size();
  out.resize(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::pair_costs(sa.rel_times[i], sa.amplitudes[i], sb.rel_times, sb.amplitudes,
                        lambda_t, lambda_x, std::span<double>(out.data() + i * m, m));
  }
}

double normalized(double lambda, std::size_t total, std::size_t matched, double pair_sum) {
  const double unmatched = static_cast<double>(total - 2 * matched);
  const double c = (lambda * unmatched + pair_sum) / static_cast<double>(total);
  // The all-ignore transformation costs exactly lambda; guard rounding.
  return std::clamp(c, 0.0, lambda);
}

}  // namespace

void CostParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(Errc::config, "lambda must be positive");
  if (!(lambda_t >= 0.0) || !std::isfinite(lambda_t)) {
    fail(Errc::config, "lambda_t must be finite and nonnegative");
  }
  if (!(lambda_x >= 0.0) || !std::isfinite(lambda_x)) {
    fail(Errc::config, "lambda_x must be finite and nonnegative");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) fail(Errc::config, "omega must be positive");
}

double point_cost(Point a, Point b, const CostParams& params) noexcept {
  return params.lambda_t * std::abs(a.time - b.time) +
         params.lambda_x * std::abs(a.value - b.value);
}

SegmentCostResult segment_cost(const Segment& sa, const Segment& sb, const CostParams& params) {
  params.validate();
  check_pair(sa, sb);
  const std::size_t n = sa.size(), m = sb.size();
  const double cap = 2.0 * params.lambda;

  SegmentCostResult result;
  if (n > 0 && m > 0) {
    std::vector<double> d;
    fill_pair_costs(sa, sb, params.lambda_t, params.lambda_x, d);
    // Smaller side becomes the row set so that every row gets a column.
    const bool transpose = n > m;
    const std::size_t rows = transpose ? m : n, cols = transpose ? n : m;
    std::vector<double> capped(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const double v = transpose ? d[c * m + r] : d[r * m + c];
        capped[r * cols + c] = std::min(v, cap) - cap;
      }
    }
    const auto assignment = min_cost_assignment(capped, rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t c = assignment[r];
      const std::size_t ia = transpose ? c : r, ib = transpose ? r : c;
      if (d[ia * m + ib] < cap) result.matching.pairs.emplace_back(ia, ib);
    }
    std::sort(result.matching.pairs.begin(), result.matching.pairs.end());
  }

  double pair_sum = 0.0;
  for (const auto& [ia, ib] : result.matching.pairs) {
    pair_sum += point_cost({sa.rel_times[ia], sa.amplitudes[ia]},
                           {sb.rel_times[ib], sb.amplitudes[ib]}, params);
  }
  result.matched_count = result.matching.pairs.size();
  result.cost = normalized(params.lambda, n + m, result.matched_count, pair_sum);
  return result;
}

SegmentCostResult brute_force_segment_cost(const Segment& sa, const Segment& sb,
                                           const CostParams& params) {
  params.validate();
  check_pair(sa, sb);
  constexpr std::size_t limit = 6;
  if (sa.size() > limit || sb.size() > limit) {
    fail(Errc::size_limit, "brute force limited to 6 points per segment");
  }
  const std::size_t n = sa.size(), m = sb.size();

  std::vector<std::pair<std::size_t, std::size_t>> current, best;
  std::vector<char> used(m, 0);
  double best_total = std::numeric_limits<double>::infinity();

  auto recurse = [&](auto&& self, std::size_t i, double pair_sum) -> void {
    if (i == n) {
      const double total =
          params.lambda * static_cast<double>(n + m - 2 * current.size()) + pair_sum;
      if (total < best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    self(self, i + 1, pair_sum);  // ignore point i
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      current.emplace_back(i, j);
      self(self, i + 1,
           pair_sum + point_cost({sa.rel_times[i], sa.amplitudes[i]},
                                 {sb.rel_times[j], sb.amplitudes[j]}, params));
      current.pop_back();
      used[j] = 0;
    }
  };
  recurse(recurse, 0, 0.0);

  double pair_sum = 0.0;
  for (const auto& [ia, ib] : best) {
    pair_sum += point_cost({sa.rel_times[ia], sa.amplitudes[ia]},
                           {sb.rel_times[ib], sb.amplitudes[ib]}, params);
  }
  SegmentCostResult result;
  result.matching.pairs = std::move(best);
  result.matched_count = result.matching.pairs.size();
  result.cost = normalized(params.lambda, n + m, result.matched_count, pair_sum);
  return result;
}

double order_preserving_cost(const Segment& sa, const Segment& sb, const CostParams& params) {
  params.validate();
  check_pair(sa, sb);
  const std::size_t n = sa.size(), m = sb.size();
  std::vector<double> d;
  fill_pair_costs(sa, sb, params.lambda_t, params.lambda_x, d);
  std::vector<double> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = params.lambda * static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = params.lambda * static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = std::min({prev[j] + params.lambda, cur[j - 1] + params.lambda,
                         prev[j - 1] + d[(i - 1) * m + (j - 1)]});
    }
    std::swap(prev, cur);
  }
  return std::clamp(prev[m] / static_cast<double>(n + m), 0.0, params.lambda);
}

double CostProfile::evaluate(double lambda) const noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < matched_cost.size(); ++k) {
    const double v = lambda * static_cast<double>(total_points - 2 * k) + matched_cost[k];
    best = std::min(best, v);
  }
  return std::clamp(best / static_cast<double>(total_points), 0.0, lambda);
}

CostProfile segment_cost_profile(const Segment& sa, const Segment& sb, double lambda_t,
                                 double lambda_x) {
  check_pair(sa, sb);
  std::vector<double> d;
  fill_pair_costs(sa, sb, lambda_t, lambda_x, d);
  return {sa.size() + sb.size(), k_matching_costs(d, sa.size(), sb.size())};
}

double calibrate_lambda_x(const IrregularSeries& series, const RegularTimeline& tl,
                          double omega) {
  if (!(omega > 0.0)) fail(Errc::config, "omega must be positive");
  const auto values = series.values();
  auto mean_of = [&](IndexRange r) {
    double s = 0.0;
    for (std::size_t i = r.begin; i < r.end; ++i) s += values[i];
    return s / static_cast<double>(r.size());
  };
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < tl.count(); ++i) {
    const double t = tl.at(i);
    const IndexRange a = time_range(series, t - omega, t);
    const IndexRange b = time_range(series, t, t + omega);
    if (a.empty() || b.empty()) continue;
    total += std::abs(mean_of(a) - mean_of(b));
    ++used;
  }
  if (used == 0) fail(Errc::all_gaps, "no timeline point has two non-empty segments");
  const double mean_diff = total / static_cast<double>(used);
  if (!(mean_diff > 0.0)) {
    fail(Errc::degenerate_amplitude, "mean amplitude difference between segments is zero");
  }
  return 1.0 / mean_diff;
}

double calibrate_lambda_t(const IrregularSeries& series, double omega) {
  if (!(omega > 0.0)) fail(Errc::config, "omega must be positive");
  const auto t = series.times();
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double d = t[i] - t[i - 1];
    if (d < omega) {
      total += d;
      ++used;
    }
  }
  if (used == 0) {
    std::ostringstream msg;
    msg << "no sampling interval is shorter than omega = " << omega;
    fail(Errc::segment_too_small, msg.str());
  }
  return static_cast<double>(used) / total;
}

double ks_distance_to_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) fail(Errc::degenerate_distribution, "KS needs at least two samples");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const Moments m = moments(x);
  if (!(m.std > 0.0)) fail(Errc::degenerate_distribution, "samples have zero variance");
  const double n = static_cast<double>(x.size());
  double worst = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    const double z = (x[i] - m.mean) / m.std;
    const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    const double below = static_cast<double>(i) / n;
    const double upto = static_cast<double>(j) / n;
    worst = std::max({worst, std::abs(below - cdf), std::abs(upto - cdf)});
    i = j;
  }
  return worst;
}

CostLandscape CostLandscape::build(const IrregularSeries& series, const RegularTimeline& tl,
                                   double omega, double lambda_t, double lambda_x,
                                   bool order_preserving) {
  if (!(omega > 0.0) || !std::isfinite(omega)) fail(Errc::config, "omega must be positive");
  CostLandscape out(tl);
  out.omega_ = omega;
  out.lambda_t_ = lambda_t;
  out.lambda_x_ = lambda_x;
  out.order_preserving_ = order_preserving;
  out.gap_mask_.assign(tl.count(), 0);

  Segment before, after;
  std::vector<double> d;
  double naive_sum = 0.0;
  std::size_t naive_count = 0;
  const auto times = series.times();
  const auto values = series.values();
  const double upper = std::nextafter(omega, 0.0);

  auto load = [&](Segment& seg, double origin, IndexRange r) {
    seg.origin = origin;
    seg.rel_times.resize(r.size());
    seg.amplitudes.resize(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
      seg.rel_times[k] = std::min(times[r.begin + k] - origin, upper);
      seg.amplitudes[k] = values[r.begin + k];
    }
  };

  for (std::size_t i = 0; i < tl.count(); ++i) {
    const double t = tl.at(i);
    const IndexRange ra = time_range(series, t - omega, t);
    const IndexRange rb = time_range(series, t, t + omega);
    if (ra.empty() || rb.empty()) {
      out.gap_mask_[i] = 1;
      continue;
    }
    load(before, t - omega, ra);
    load(after, t, rb);
    const std::size_t n = before.size(), m = after.size();
    fill_pair_costs(before, after, lambda_t, lambda_x, d);

    for (std::size_t a = 0; a < n; ++a) {
      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < m; ++b) {
        const double gap = std::abs(before.rel_times[a] - after.rel_times[b]);
        if (gap < best) {
          best = gap;
          nearest = b;
        }
      }
      naive_sum += d[a * m + nearest];
      ++naive_count;
    }

    out.slot_total_.push_back(n + m);
    out.slot_offset_.push_back(out.profile_data_.size());
    if (order_preserving) {
      out.before_.push_back(before);
      out.after_.push_back(after);
    } else {
      const auto profile = k_matching_costs(d, n, m);
      out.profile_data_.insert(out.profile_data_.end(), profile.begin(), profile.end());
    }
  }
  out.slot_offset_.push_back(out.profile_data_.size());
  out.mean_naive_pair_cost_ =
      naive_count > 0 ? naive_sum / static_cast<double>(naive_count) : 0.0;
  return out;
}

std::size_t CostLandscape::gap_count() const noexcept {
  return static_cast<std::size_t>(std::count(gap_mask_.begin(), gap_mask_.end(), 1));
}

double CostLandscape::cost_at(std::size_t slot, double lambda) const {
  if (order_preserving_) {
    CostParams p{lambda, lambda_t_, lambda_x_, omega_};
    return order_preserving_cost(before_[slot], after_[slot], p);
  }
  const std::size_t total = slot_total_[slot];
  const std::size_t begin = slot_offset_[slot], end = slot_offset_[slot + 1];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < end - begin; ++k) {
    best = std::min(best, lambda * static_cast<double>(total - 2 * k) + profile_data_[begin + k]);
  }
  return std::clamp(best / static_cast<double>(total), 0.0, lambda);
}

std::vector<double> CostLandscape::costs(double lambda) const {
  std::vector<double> out(gap_mask_.size(), std::numeric_limits<double>::quiet_NaN());
  std::size_t slot = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!gap_mask_[i]) out[i] = cost_at(slot++, lambda);
  }
  return out;
}

std::vector<double> CostLandscape::filtered_costs(double lambda) const {
  std::vector<double> out(slot_total_.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s] = cost_at(s, lambda);
  return out;
}

std::vector<double> default_lambda_grid(const CostLandscape& landscape) {
  double scale = landscape.mean_naive_pair_cost();
  // Identical neighbouring segments give a zero naive cost; fall back to
  // the unit scale that the calibrated unit costs normalize to.
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  constexpr std::size_t count = 60;
  const double lo = 0.05 * scale, hi = 6.0 * scale;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

LambdaChoice optimize_lambda(const CostLandscape& landscape, std::span<const double> grid) {
  if (grid.empty()) fail(Errc::config, "lambda grid is empty");
  LambdaChoice best{0.0, std::numeric_limits<double>::infinity()};
  bool found = false;
  for (double lambda : grid) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(Errc::config, "lambda must be positive");
    const auto costs = landscape.filtered_costs(lambda);
    double ks = 0.0;
    try {
      ks = ks_distance_to_gaussian(costs);
    } catch (const Error& e) {
      if (e.code() == Errc::degenerate_distribution) continue;
      throw;
    }
    if (!found || ks < best.ks || (ks == best.ks && lambda < best.lambda)) {
      best = {lambda, ks};
      found = true;
    }
  }
  if (!found) fail(Errc::optimization_failed, "every lambda candidate gave a degenerate cost series");
  return best;
}

LambdaChoice optimize_lambda(const IrregularSeries& series, const RegularTimeline& tl,
                             double omega, std::span<const double> grid) {
  const double lambda_x = calibrate_lambda_x(series, tl, omega);
  const double lambda_t = calibrate_lambda_t(series, omega);
  const auto landscape = CostLandscape::build(series, tl, omega, lambda_t, lambda_x);
  return optimize_lambda(landscape, grid);
}

}  // namespace tacts
