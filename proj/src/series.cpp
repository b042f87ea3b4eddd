#include "tacts/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tacts/error.hpp"

namespace tacts {

namespace {

void validate_pairs(std::span<const double> times, std::span<const double> values) {
  if (times.empty()) fail(Errc::invalid_input, "series must contain at least one point");
  if (times.size() != values.size()) {
    fail(Errc::invalid_input, "times and values differ in length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "non-finite measurement at index " << i;
      fail(Errc::invalid_input, msg.str());
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      std::ostringstream msg;
      msg.precision(17);
      if (times[i] == times[i - 1]) {
        msg << "duplicate timestamp " << times[i];
        fail(Errc::duplicate_time, msg.str());
      }
      msg << "timestamps not increasing at index " << i;
      fail(Errc::invalid_input, msg.str());
    }
  }
}

}  // namespace

IrregularSeries::IrregularSeries(std::vector<double> times, std::vector<double> values,
                                 std::string time_unit, std::string value_unit)
    : times_(std::move(times)),
      values_(std::move(values)),
      time_unit_(std::move(time_unit)),
      value_unit_(std::move(value_unit)) {
  validate_pairs(times_, values_);
}

IrregularSeries IrregularSeries::with_values(std::vector<double> values) const {
  return IrregularSeries(times_, std::move(values), time_unit_, value_unit_);
}

RegularTimeline::RegularTimeline(double t0, double step, std::size_t count)
    : t0_(t0), step_(step), count_(count) {
  if (!std::isfinite(t0) || !std::isfinite(step) || !(step > 0.0)) {
    fail(Errc::config, "timeline step must be positive and finite");
  }
  if (count == 0) fail(Errc::config, "timeline must contain at least one point");
}

std::vector<double> timeline_points(const RegularTimeline& tl) {
  std::vector<double> out(tl.count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = tl.at(i);
  return out;
}

IndexRange time_range(const IrregularSeries& series, double lo, double hi) {
  const auto times = series.times();
  const auto first = std::lower_bound(times.begin(), times.end(), lo);
  const auto last = std::lower_bound(first, times.end(), hi);
  return {static_cast<std::size_t>(first - times.begin()),
          static_cast<std::size_t>(last - times.begin())};
}

IndexRange segment_range(const IrregularSeries& series, double start, double width) {
  return time_range(series, start, start + width);
}

Segment extract_segment(const IrregularSeries& series, double start, double width) {
  if (!(width > 0.0)) fail(Errc::invalid_input, "segment width must be positive");
  const IndexRange range = segment_range(series, start, width);
  Segment seg;
  seg.origin = start;
  seg.rel_times.reserve(range.size());
  seg.amplitudes.reserve(range.size());
  const double upper = std::nextafter(width, 0.0);
  for (std::size_t i = range.begin; i < range.end; ++i) {
    // Rounding of t - start may land on width itself; keep the half-open
    // invariant.
    seg.rel_times.push_back(std::min(series.times()[i] - start, upper));
    seg.amplitudes.push_back(series.values()[i]);
  }
  return seg;
}

SamplingStats sampling_stats(const IrregularSeries& series) {
  if (series.size() < 2) fail(Errc::invalid_input, "sampling stats need at least two points");
  const auto t = series.times();
  std::vector<double> diffs(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) diffs[i - 1] = t[i] - t[i - 1];
  const Moments m = moments(diffs);
  return {m.mean, m.std, series.size()};
}

Moments moments(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

}  // namespace tacts
