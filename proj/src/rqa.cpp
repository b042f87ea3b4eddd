#include "tacts/rqa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tacts/error.hpp"
#include "tacts/kernels.hpp"
#include "tacts/parallel.hpp"
#include "tacts/random.hpp"

namespace tacts {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// 256 MiB of diagonal bits; larger problems scan each window directly.
constexpr std::size_t bank_word_limit = std::size_t{1} << 25;

// Maximal runs of one recurrence diagonal with prefix sums, answering
// clipped line counts for any index range in logarithmic time.
class RunTable {
 public:
  RunTable() = default;
  RunTable(std::span<const std::uint64_t> bits, std::size_t nbits, std::size_t l_min) {
    prefix_all_.push_back(0);
    prefix_long_.push_back(0);
    kernels::for_each_run(bits, nbits, [&](std::size_t start, std::size_t len) {
      starts_.push_back(start);
      ends_.push_back(start + len);
      prefix_all_.push_back(prefix_all_.back() + len);
      prefix_long_.push_back(prefix_long_.back() + (len >= l_min ? len : 0));
    });
  }

  struct Counts {
    std::uint64_t all = 0;
    std::uint64_t in_lines = 0;
  };

  struct Cursor {
    std::size_t j0 = 0;
    std::size_t j1 = 0;
  };

  /// Recurrent points and points on lines of length >= l_min inside [a, c),
  /// with runs cut at the range ends. Successive calls through one cursor
  /// must not decrease a or c.
  Counts clipped(std::size_t a, std::size_t c, std::size_t l_min, Cursor& cur) const {
    Counts out;
    if (c <= a) return out;
    while (cur.j0 < ends_.size() && ends_[cur.j0] <= a) ++cur.j0;
    while (cur.j1 < starts_.size() && starts_[cur.j1] < c) ++cur.j1;
    const std::size_t j0 = cur.j0, j1 = cur.j1;
    if (j0 >= j1) return out;
    auto add = [&](std::size_t len) {
      out.all += len;
      if (len >= l_min) out.in_lines += len;
    };
    if (j1 - j0 == 1) {
      add(std::min(ends_[j0], c) - std::max(starts_[j0], a));
      return out;
    }
    add(ends_[j0] - std::max(starts_[j0], a));
    add(std::min(ends_[j1 - 1], c) - starts_[j1 - 1]);
    out.all += prefix_all_[j1 - 1] - prefix_all_[j0 + 1];
    out.in_lines += prefix_long_[j1 - 1] - prefix_long_[j0 + 1];
    return out;
  }

 private:
  std::vector<std::size_t> starts_;
  std::vector<std::size_t> ends_;
  std::vector<std::uint64_t> prefix_all_;
  std::vector<std::uint64_t> prefix_long_;
};

// Visits every maximal diagonal line as (length, multiplicity).
template <typename Fn>
void for_each_line(std::span<const double> x, double eps, bool include_loi, Fn&& fn) {
  const std::size_t n = x.size();
  if (n == 0) return;
  if (include_loi) fn(n, 1);
  thread_local std::vector<std::uint64_t> bits;
  bits.resize(kernels::words_for(n));
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t len = n - k;
    kernels::diagonal_mask(x, k, eps, bits);
    kernels::for_each_run(bits, len, [&](std::size_t, std::size_t run) { fn(run, 2); });
  }
}

}  // namespace

std::uint64_t RecurrenceMatrix::recurrence_count() const noexcept {
  return static_cast<std::uint64_t>(std::count(cells.begin(), cells.end(), 1));
}

RecurrenceMatrix recurrence_matrix(std::span<const double> window, double eps) {
  if (!(eps >= 0.0)) fail(Errc::invalid_input, "recurrence threshold must be nonnegative");
  RecurrenceMatrix rm;
  rm.size = window.size();
  rm.eps = eps;
  rm.cells.resize(rm.size * rm.size);
  for (std::size_t i = 0; i < rm.size; ++i) {
    for (std::size_t j = 0; j < rm.size; ++j) {
      rm.cells[i * rm.size + j] = std::abs(window[i] - window[j]) <= eps ? 1 : 0;
    }
  }
  return rm;
}

std::uint64_t DiagonalHistogram::total_points() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t l = 1; l < counts.size(); ++l) s += l * counts[l];
  return s;
}

std::uint64_t DiagonalHistogram::line_count() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t l = 1; l < counts.size(); ++l) s += counts[l];
  return s;
}

std::uint64_t DiagonalHistogram::points_in_lines(std::size_t l_min) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t l = std::max<std::size_t>(l_min, 1); l < counts.size(); ++l) {
    s += l * counts[l];
  }
  return s;
}

DiagonalHistogram diagonal_histogram(const RecurrenceMatrix& rm, bool include_loi) {
  const std::size_t n = rm.size;
  DiagonalHistogram hist;
  hist.counts.assign(n + 1, 0);
  // Offsets -(n-1)..(n-1); offset 0 is the line of identity.
  for (std::size_t d = 0; d < 2 * n - 1 && n > 0; ++d) {
    const long offset = static_cast<long>(d) - static_cast<long>(n - 1);
    if (offset == 0 && !include_loi) continue;
    std::size_t i = offset < 0 ? static_cast<std::size_t>(-offset) : 0;
    std::size_t j = offset > 0 ? static_cast<std::size_t>(offset) : 0;
    std::size_t run = 0;
    for (; i < n && j < n; ++i, ++j) {
      if (rm.at(i, j)) {
        ++run;
      } else if (run > 0) {
        ++hist.counts[run];
        run = 0;
      }
    }
    if (run > 0) ++hist.counts[run];
  }
  return hist;
}

double determinism(const DiagonalHistogram& hist, std::size_t l_min) {
  const std::uint64_t total = hist.total_points();
  if (total == 0) fail(Errc::degenerate_distribution, "no recurrence points; DET undefined");
  return static_cast<double>(hist.points_in_lines(l_min)) / static_cast<double>(total);
}

DiagonalHistogram window_histogram(std::span<const double> window, double eps, bool include_loi) {
  if (!(eps >= 0.0)) fail(Errc::invalid_input, "recurrence threshold must be nonnegative");
  DiagonalHistogram hist;
  hist.counts.assign(window.size() + 1, 0);
  for_each_line(window, eps, include_loi,
                [&](std::size_t length, std::uint64_t mult) { hist.counts[length] += mult; });
  return hist;
}

LineCounts window_line_counts(std::span<const double> window, double eps, std::size_t l_min,
                              bool include_loi) {
  if (!(eps >= 0.0)) fail(Errc::invalid_input, "recurrence threshold must be nonnegative");
  LineCounts out;
  for_each_line(window, eps, include_loi, [&](std::size_t length, std::uint64_t mult) {
    out.recurrent += length * mult;
    if (length >= l_min) out.in_lines += length * mult;
  });
  return out;
}

std::size_t DetSeries::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

DetSeries det_series(const RegularSeriesView& series, const RegularTimeline& rec_tl,
                     const DetOptions& options) {
  const RegularTimeline& tl = series.timeline;
  if (series.values.size() != tl.count() || series.gap_mask.size() != tl.count()) {
    fail(Errc::invalid_input, "series values and gap mask must match the timeline");
  }
  if (!(options.frame > rec_tl.step()) || !std::isfinite(options.frame)) {
    fail(Errc::config, "recurrence frame must exceed the recurrence timeline step");
  }
  if (!(options.eps_fraction >= 0.0)) fail(Errc::config, "eps fraction must be nonnegative");
  if (options.l_min < 1) fail(Errc::config, "l_min must be at least 1");

  std::vector<double> kept;
  kept.reserve(tl.count());
  for (std::size_t i = 0; i < tl.count(); ++i) {
    if (!series.gap_mask[i]) kept.push_back(series.values[i]);
  }
  if (kept.empty()) fail(Errc::empty_series, "series has no non-gap points");
  const double sigma = moments(kept).std;

  DetSeries out{rec_tl, std::vector<double>(rec_tl.count(), nan_value),
                std::vector<std::uint8_t>(rec_tl.count(), 0), options.frame,
                options.eps_fraction, options.eps_fraction * sigma, options.l_min, 0, {}};
  if (options.keep_histograms) out.histograms.resize(rec_tl.count());

  // Prefix count of gaps for O(1) window checks.
  std::vector<std::size_t> gap_prefix(tl.count() + 1, 0);
  for (std::size_t i = 0; i < tl.count(); ++i) {
    gap_prefix[i + 1] = gap_prefix[i] + (series.gap_mask[i] ? 1 : 0);
  }

  const double half = options.frame / 2.0;
  const double span_lo = tl.t0() - tl.step();
  const double span_hi = tl.t0() + static_cast<double>(tl.count()) * tl.step();
  std::vector<std::uint8_t> complete(rec_tl.count(), 0);

  // Every window shares the global threshold, so its recurrence plot is a
  // block of the series-wide plot: diagonal k of the window at [b, e) is bits
  // [b, e - k) of the global diagonal k. Precompute those diagonals once.
  const auto max_window = static_cast<std::size_t>(std::ceil(options.frame / tl.step())) + 1;
  const std::size_t n = tl.count();
  const std::size_t diagonals = std::min(max_window, n);
  const std::size_t stride = kernels::words_for(n);
  const bool banked = diagonals * stride <= bank_word_limit;
  std::vector<std::uint64_t> bank;
  std::vector<RunTable> tables;
  if (banked) {
    bank.assign(diagonals * stride, 0);
    if (!options.keep_histograms) tables.resize(diagonals);
    parallel_for(diagonals, options.workers, [&](std::size_t k) {
      if (k == 0) return;
      const std::span<std::uint64_t> diag = std::span<std::uint64_t>(bank).subspan(k * stride, stride);
      kernels::diagonal_mask(series.values, k, out.eps, diag);
      if (!tables.empty()) tables[k] = RunTable(diag, n - k, options.l_min);
    });
    if (!tables.empty()) std::vector<std::uint64_t>().swap(bank);
  }
  auto scan = [&](std::size_t begin, std::size_t end, auto&& fn) {
    const std::size_t w = end - begin;
    if (options.include_loi) fn(w, 1);
    for (std::size_t k = 1; k < w; ++k) {
      const std::span<const std::uint64_t> diag(bank.data() + k * stride, stride);
      kernels::for_each_run_in(diag, begin, end - k, [&](std::size_t, std::size_t run) { fn(run, 2); });
    }
  };

  // First index strictly after `bound`, or at or after it when not strict.
  auto first_after = [&](double bound, bool strict) {
    double c = std::floor((bound - tl.t0()) / tl.step());
    std::size_t i = c < 0 ? 0 : std::min(static_cast<std::size_t>(c), tl.count());
    while (i > 0 && (strict ? tl.at(i - 1) > bound : tl.at(i - 1) >= bound)) --i;
    while (i < tl.count() && (strict ? tl.at(i) <= bound : tl.at(i) < bound)) ++i;
    return i;
  };
  std::vector<std::size_t> begins(rec_tl.count(), 0), ends(rec_tl.count(), 0);
  std::vector<std::uint8_t> usable(rec_tl.count(), 0);
  for (std::size_t r = 0; r < rec_tl.count(); ++r) {
    const double t = rec_tl.at(r);
    const double lo_t = t - half, hi_t = t + half;
    if (!(span_lo <= lo_t && hi_t <= span_hi)) continue;
    complete[r] = 1;
    const std::size_t begin = first_after(lo_t, true);
    const std::size_t end = first_after(hi_t, false);
    begins[r] = begin;
    ends[r] = end;
    if (end <= begin || end - begin < options.min_points) continue;
    if (gap_prefix[end] - gap_prefix[begin] != 0) continue;
    if (banked && end - begin > diagonals) fail(Errc::numerical, "window exceeds the diagonal bank");
    usable[r] = 1;
  }

  // Window bounds never decrease with r, so each chunk of consecutive
  // windows walks the run tables with forward-only cursors.
  const std::size_t chunks = std::clamp<std::size_t>(options.workers, 1, rec_tl.count());
  parallel_for(chunks, options.workers, [&](std::size_t chunk) {
    const std::size_t r_lo = chunk * rec_tl.count() / chunks;
    const std::size_t r_hi = (chunk + 1) * rec_tl.count() / chunks;
    std::vector<RunTable::Cursor> cursors(tables.size());
    for (std::size_t r = r_lo; r < r_hi; ++r) {
      if (!usable[r]) continue;
      const std::size_t begin = begins[r], end = ends[r];
      const auto window = series.values.subspan(begin, end - begin);
      if (options.keep_histograms) {
        DiagonalHistogram hist;
        if (banked) {
          hist.counts.assign(window.size() + 1, 0);
          scan(begin, end, [&](std::size_t length, std::uint64_t mult) { hist.counts[length] += mult; });
        } else {
          hist = window_histogram(window, out.eps, options.include_loi);
        }
        if (hist.empty()) continue;
        out.values[r] = determinism(hist, options.l_min);
        out.histograms[r] = std::move(hist);
      } else {
        LineCounts lc;
        if (banked) {
          const std::size_t w = end - begin;
          if (options.include_loi) {
            lc.recurrent += w;
            if (w >= options.l_min) lc.in_lines += w;
          }
          for (std::size_t k = 1; k < w; ++k) {
            const auto [all, in_lines] = tables[k].clipped(begin, end - k, options.l_min, cursors[k]);
            lc.recurrent += 2 * all;
            lc.in_lines += 2 * in_lines;
          }
        } else {
          lc = window_line_counts(window, out.eps, options.l_min, options.include_loi);
        }
        if (lc.recurrent == 0) continue;
        out.values[r] = static_cast<double>(lc.in_lines) / static_cast<double>(lc.recurrent);
      }
      out.valid[r] = 1;
    }
  });
  out.complete_windows = static_cast<std::size_t>(std::count(complete.begin(), complete.end(), 1));
  if (out.valid_count() == 0) fail(Errc::empty_series, "no valid determinism window");
  return out;
}

std::size_t SDetSeries::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

SDetSeries sdet(std::span<const DetSeries> members) {
  if (members.empty()) fail(Errc::invalid_input, "SDET needs at least one member");
  const RegularTimeline& tl = members.front().rec_timeline;
  for (const auto& m : members) {
    if (!(m.rec_timeline == tl)) fail(Errc::timeline_mismatch, "members use different timelines");
  }
  SDetSeries out{tl, std::vector<double>(tl.count(), nan_value),
                 std::vector<std::size_t>(tl.count(), 0), std::vector<std::uint8_t>(tl.count(), 0),
                 {}, {}, std::vector<Significance>(tl.count(), Significance::none)};
  for (std::size_t r = 0; r < tl.count(); ++r) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : members) {
      if (m.valid[r]) {
        sum += m.values[r];
        ++n;
      }
    }
    out.member_count[r] = n;
    if (n > 0) {
      out.values[r] = sum / static_cast<double>(n);
      out.valid[r] = 1;
    }
  }
  return out;
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) fail(Errc::invalid_input, "quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) fail(Errc::config, "quantile must lie in [0, 1]");
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BootstrapBand bootstrap_band(std::span<const DetSeries> members, const BootstrapOptions& options) {
  if (members.empty()) fail(Errc::invalid_input, "bootstrap needs at least one member");
  if (options.n_surrogates < 100) fail(Errc::config, "bootstrap needs at least 100 surrogates");
  if (!(0.0 <= options.q_low && options.q_low < options.q_high && options.q_high <= 1.0)) {
    fail(Errc::config, "quantiles must satisfy 0 <= low < high <= 1");
  }
  const RegularTimeline& tl = members.front().rec_timeline;

  BootstrapBand band;
  band.members.resize(members.size());
  for (std::size_t mi = 0; mi < members.size(); ++mi) {
    const DetSeries& m = members[mi];
    if (!(m.rec_timeline == tl)) fail(Errc::timeline_mismatch, "members use different timelines");
    if (m.histograms.size() != m.values.size()) {
      fail(Errc::invalid_input, "bootstrap needs per-window histograms");
    }
    std::vector<double> mean_p;
    double mean_lines = 0.0;
    std::size_t windows = 0;
    for (std::size_t r = 0; r < m.values.size(); ++r) {
      if (!m.valid[r]) continue;
      const auto& h = m.histograms[r];
      const double lines = static_cast<double>(h.line_count());
      if (mean_p.size() < h.counts.size()) mean_p.resize(h.counts.size(), 0.0);
      for (std::size_t l = 1; l < h.counts.size(); ++l) {
        mean_p[l] += static_cast<double>(h.counts[l]) / lines;
      }
      mean_lines += lines;
      ++windows;
    }
    if (windows == 0) fail(Errc::empty_series, "bootstrap member has no valid window");
    for (double& p : mean_p) p /= static_cast<double>(windows);
    mean_lines /= static_cast<double>(windows);
    const auto structures =
        static_cast<std::size_t>(std::max<long long>(1, std::llround(mean_lines)));

    std::vector<double> cumulative(mean_p.size(), 0.0);
    double acc = 0.0;
    for (std::size_t l = 1; l < mean_p.size(); ++l) {
      acc += mean_p[l];
      cumulative[l] = acc;
    }
    const double total_p = acc;

    Rng rng(derive_seed(options.seed, mi));
    std::vector<double> surrogate(options.n_surrogates);
    for (double& s : surrogate) {
      std::uint64_t all = 0, in_lines = 0;
      for (std::size_t k = 0; k < structures; ++k) {
        const double u = uniform01(rng) * total_p;
        auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), u);
        if (it == cumulative.end()) --it;
        const auto length = static_cast<std::uint64_t>(it - cumulative.begin());
        all += length;
        if (length >= options.l_min) in_lines += length;
      }
      s = static_cast<double>(in_lines) / static_cast<double>(all);
    }
    std::sort(surrogate.begin(), surrogate.end());
    MemberBand& mb = band.members[mi];
    mb.low = quantile_sorted(surrogate, options.q_low);
    mb.high = quantile_sorted(surrogate, options.q_high);
    mb.collapsed = surrogate.front() == surrogate.back();
    mb.structures = structures;
    mb.length_distribution = std::move(mean_p);
  }

  band.ci_low.assign(tl.count(), nan_value);
  band.ci_high.assign(tl.count(), nan_value);
  for (std::size_t r = 0; r < tl.count(); ++r) {
    double lo = 0.0, hi = 0.0;
    std::size_t n = 0;
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
      if (!members[mi].valid[r]) continue;
      lo += band.members[mi].low;
      hi += band.members[mi].high;
      ++n;
    }
    if (n > 0) {
      band.ci_low[r] = lo / static_cast<double>(n);
      band.ci_high[r] = hi / static_cast<double>(n);
    }
  }
  return band;
}

std::vector<Significance> significance_flags(const SDetSeries& series) {
  std::vector<Significance> flags(series.values.size(), Significance::none);
  if (series.ci_low.size() != flags.size() || series.ci_high.size() != flags.size()) return flags;
  for (std::size_t r = 0; r < flags.size(); ++r) {
    if (!series.valid[r] || std::isnan(series.ci_low[r]) || std::isnan(series.ci_high[r])) continue;
    if (series.values[r] > series.ci_high[r]) {
      flags[r] = Significance::high;
    } else if (series.values[r] < series.ci_low[r]) {
      flags[r] = Significance::low;
    }
  }
  return flags;
}

void attach_band(SDetSeries& series, const BootstrapBand& band) {
  if (band.ci_low.size() != series.values.size()) {
    fail(Errc::timeline_mismatch, "band and SDET series differ in length");
  }
  series.ci_low = band.ci_low;
  series.ci_high = band.ci_high;
  series.flags = significance_flags(series);
}

}  // namespace tacts
