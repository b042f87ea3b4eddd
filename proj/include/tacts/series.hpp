#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tacts {

/// Ordered (time, amplitude) measurements with non-uniform spacing.
///
/// Construction validates the invariants: equal nonzero lengths, finite
/// values and strictly increasing times. Ties are rejected.
class IrregularSeries {
 public:
  IrregularSeries(std::vector<double> times, std::vector<double> values,
                  std::string time_unit = {}, std::string value_unit = {});

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return times_.size(); }
  double first_time() const noexcept { return times_.front(); }
  double last_time() const noexcept { return times_.back(); }
  const std::string& time_unit() const noexcept { return time_unit_; }
  const std::string& value_unit() const noexcept { return value_unit_; }

  /// Same times, new amplitudes (used by rescaling and permutation tests).
  IrregularSeries with_values(std::vector<double> values) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::string time_unit_;
  std::string value_unit_;
};

/// Evenly spaced points {t0 + i*step | 0 <= i < count}.
class RegularTimeline {
 public:
  RegularTimeline(double t0, double step, std::size_t count);

  double t0() const noexcept { return t0_; }
  double step() const noexcept { return step_; }
  std::size_t count() const noexcept { return count_; }
  double at(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * step_; }
  double front() const noexcept { return t0_; }
  double back() const noexcept { return at(count_ - 1); }

  friend bool operator==(const RegularTimeline&, const RegularTimeline&) = default;

 private:
  double t0_;
  double step_;
  std::size_t count_;
};

std::vector<double> timeline_points(const RegularTimeline& tl);

/// Points of a half-open interval [origin, origin + width), times relative to origin.
struct Segment {
  std::vector<double> rel_times;
  std::vector<double> amplitudes;
  double origin = 0.0;

  std::size_t size() const noexcept { return rel_times.size(); }
  bool empty() const noexcept { return rel_times.empty(); }
};

Segment extract_segment(const IrregularSeries& series, double start, double width);

/// Index range [begin, end) of the points with time in [start, start + width).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return begin == end; }
};

IndexRange segment_range(const IrregularSeries& series, double start, double width);
/// Indices of the points with time in [lo, hi).
IndexRange time_range(const IrregularSeries& series, double lo, double hi);

struct SamplingStats {
  double mean_dt = 0.0;
  double std_dt = 0.0;  // population definition
  std::size_t count = 0;
};

SamplingStats sampling_stats(const IrregularSeries& series);

/// Population mean and standard deviation.
struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(std::span<const double> values);

/// Values on a regular timeline with a per-point gap mask (1 = gap).
struct RegularSeriesView {
  const RegularTimeline& timeline;
  std::span<const double> values;
  std::span<const std::uint8_t> gap_mask;
};

}  // namespace tacts
