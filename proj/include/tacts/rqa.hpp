#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tacts/series.hpp"

namespace tacts {

/// Dense symmetric recurrence plot of a 1-D window under |x_i - x_j| <= eps.
struct RecurrenceMatrix {
  std::size_t size = 0;
  double eps = 0.0;
  std::vector<std::uint8_t> cells;  // row-major size x size

  bool at(std::size_t i, std::size_t j) const noexcept { return cells[i * size + j] != 0; }
  std::uint64_t recurrence_count() const noexcept;
};

RecurrenceMatrix recurrence_matrix(std::span<const double> window, double eps);

/// counts[l] = number of maximal diagonal lines of length exactly l, over
/// both triangles and (optionally) the line of identity. counts[0] is unused.
struct DiagonalHistogram {
  std::vector<std::uint64_t> counts;

  std::uint64_t total_points() const noexcept;
  std::uint64_t line_count() const noexcept;
  std::uint64_t points_in_lines(std::size_t l_min) const noexcept;
  std::uint64_t count(std::size_t length) const noexcept {
    return length < counts.size() ? counts[length] : 0;
  }
  bool empty() const noexcept { return total_points() == 0; }
};

DiagonalHistogram diagonal_histogram(const RecurrenceMatrix& rm, bool include_loi = true);

/// Fraction of recurrence points on diagonal lines of length >= l_min.
/// Throws when the histogram holds no recurrence points.
double determinism(const DiagonalHistogram& hist, std::size_t l_min = 2);

// Bitset kernel path: same results as recurrence_matrix + diagonal_histogram
// without materializing the matrix.
DiagonalHistogram window_histogram(std::span<const double> window, double eps,
                                   bool include_loi = true);

struct LineCounts {
  std::uint64_t recurrent = 0;
  std::uint64_t in_lines = 0;  // points on lines of length >= l_min
};

LineCounts window_line_counts(std::span<const double> window, double eps, std::size_t l_min,
                              bool include_loi = true);

struct DetOptions {
  double frame = 0.0;  // L, in timeline units
  double eps_fraction = 0.1;
  std::size_t l_min = 2;
  bool include_loi = true;
  std::size_t min_points = 10;
  bool keep_histograms = false;  // needed by bootstrap_band
  std::size_t workers = 1;
};

/// Windowed determinism on a recurrence timeline.
///
/// The window at t holds the series points with time in (t - L/2, t + L/2).
/// A window is invalid when it reaches past either end of the series
/// timeline, touches a gap-masked point, or holds fewer than min_points.
struct DetSeries {
  RegularTimeline rec_timeline;
  std::vector<double> values;  // NaN where invalid
  std::vector<std::uint8_t> valid;
  double frame = 0.0;
  double eps_fraction = 0.0;
  double eps = 0.0;
  std::size_t l_min = 2;
  std::size_t complete_windows = 0;  // windows inside the series span, gaps or not
  std::vector<DiagonalHistogram> histograms;  // per point when kept; empty if invalid

  std::size_t valid_count() const noexcept;
};

DetSeries det_series(const RegularSeriesView& series, const RegularTimeline& rec_tl,
                     const DetOptions& options);

enum class Significance : std::uint8_t { none, high, low };

struct SDetSeries {
  RegularTimeline rec_timeline;
  std::vector<double> values;  // NaN where no member is valid
  std::vector<std::size_t> member_count;
  std::vector<std::uint8_t> valid;
  std::vector<double> ci_low;   // empty until a band is attached; NaN where undefined
  std::vector<double> ci_high;
  std::vector<Significance> flags;

  std::size_t valid_count() const noexcept;
};

/// Per-point mean over the members valid at that point.
SDetSeries sdet(std::span<const DetSeries> members);

struct BootstrapOptions {
  std::size_t n_surrogates = 1000;
  double q_low = 0.01;
  double q_high = 0.99;
  std::uint64_t seed = 0;
  std::size_t l_min = 2;
};

struct MemberBand {
  double low = 0.0;
  double high = 0.0;
  bool collapsed = false;  // all surrogates equal
  std::size_t structures = 0;
  std::vector<double> length_distribution;  // index l, averaged over windows
};

struct BootstrapBand {
  std::vector<MemberBand> members;
  std::vector<double> ci_low;  // per recurrence point, averaged over valid members
  std::vector<double> ci_high;
};

/// Surrogate DET confidence band from the window-averaged line-length
/// distribution of each member. Members must carry histograms.
BootstrapBand bootstrap_band(std::span<const DetSeries> members, const BootstrapOptions& options);

/// Linear-interpolation (type 7) quantile of a sorted sample.
double quantile_sorted(std::span<const double> sorted, double q);

std::vector<Significance> significance_flags(const SDetSeries& series);

/// Copies the band into the series and recomputes the flags.
void attach_band(SDetSeries& series, const BootstrapBand& band);

}  // namespace tacts
