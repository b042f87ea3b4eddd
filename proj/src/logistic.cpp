#include "tacts/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tacts/error.hpp"
#include "tacts/parallel.hpp"
#include "tacts/random.hpp"
#include "tacts/spectrum.hpp"

namespace tacts {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

DetSeries all_invalid(const RegularTimeline& rec_tl, const DetOptions& opts) {
  DetSeries d{rec_tl, std::vector<double>(rec_tl.count(), nan_value),
              std::vector<std::uint8_t>(rec_tl.count(), 0), opts.frame, opts.eps_fraction,
              0.0, opts.l_min, 0, {}};
  return d;
}

DetSeries det_or_invalid(const RegularSeriesView& view, const RegularTimeline& rec_tl,
                         const DetOptions& opts) {
  try {
    return det_series(view, rec_tl, opts);
  } catch (const Error& e) {
    if (e.code() != Errc::empty_series) throw;
    return all_invalid(rec_tl, opts);
  }
}

double error_or_nan(std::span<const double> values, std::span<const std::uint8_t> valid,
                    std::span<const Regime> truth, std::vector<Regime>* labels_out = nullptr) {
  try {
    auto labels = classify_by_det(values, valid);
    const double e = mismatch_ratio(labels, truth);
    if (labels_out) *labels_out = std::move(labels);
    return e;
  } catch (const Error&) {
    if (labels_out) labels_out->assign(values.size(), Regime::unknown);
    return nan_value;
  }
}

}  // namespace

void DriftSchedule::validate() const {
  if (steps == 0) fail(Errc::config, "drift schedule needs at least one step");
  if (!(r_start > 0.0 && r_start <= 4.0 && r_end > 0.0 && r_end <= 4.0)) {
    fail(Errc::config, "logistic parameter must lie in (0, 4]");
  }
}

IrregularSeries logistic_trajectory(const DriftSchedule& schedule, double x0,
                                    std::size_t transient) {
  schedule.validate();
  if (!(x0 > 0.0 && x0 < 1.0)) fail(Errc::config, "x0 must lie in (0, 1)");
  double x = x0;
  for (std::size_t i = 0; i < transient; ++i) x = schedule.r_start * x * (1.0 - x);
  std::vector<double> times(schedule.steps), values(schedule.steps);
  for (std::size_t n = 0; n < schedule.steps; ++n) {
    x = schedule.r_at(static_cast<double>(n)) * x * (1.0 - x);
    if (!(x >= 0.0 && x <= 1.0)) fail(Errc::numerical, "logistic orbit left [0, 1]");
    times[n] = static_cast<double>(n + 1);
    values[n] = x;
  }
  return IrregularSeries(std::move(times), std::move(values), "step", "x");
}

void DistortionConfig::validate() const {
  if (!(removal >= 0.0 && removal < 1.0)) fail(Errc::config, "removal fraction must lie in [0, 1)");
  if (!(noise_K >= 0.0) || !std::isfinite(noise_K)) fail(Errc::config, "noise bound must be >= 0");
}

IrregularSeries distort(const IrregularSeries& series, const DistortionConfig& config) {
  config.validate();
  const std::size_t n = series.size();
  const auto remove = static_cast<std::size_t>(std::llround(config.removal * static_cast<double>(n)));
  if (n < remove + 2) fail(Errc::config, "removal must leave at least two points");

  Rng rng(derive_seed(config.seed, 0));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `remove` slots become the removed set.
  for (std::size_t i = 0; i < remove; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::uint8_t> removed(n, 0);
  for (std::size_t i = 0; i < remove; ++i) removed[order[i]] = 1;

  std::vector<double> times, values;
  times.reserve(n - remove);
  values.reserve(n - remove);
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;
    times.push_back(series.times()[i]);
    values.push_back(series.values()[i]);
  }
  if (config.noise_K > 0.0) {
    const double bound = config.noise_K * moments(values).std;
    Rng noise_rng(derive_seed(config.seed, 1));
    for (double& v : values) v += (2.0 * uniform01(noise_rng) - 1.0) * bound;
  }
  return IrregularSeries(std::move(times), std::move(values), series.time_unit(),
                         series.value_unit());
}

LyapunovEstimate lyapunov_exponent(double r, std::size_t transient, std::size_t iters, double x0) {
  if (!(r > 0.0 && r <= 4.0)) fail(Errc::config, "logistic parameter must lie in (0, 4]");
  if (iters < 1000) fail(Errc::config, "Lyapunov estimate needs at least 1000 iterations");
  if (!(x0 > 0.0 && x0 < 1.0)) fail(Errc::config, "x0 must lie in (0, 1)");
  double x = x0;
  for (std::size_t i = 0; i < transient; ++i) x = r * x * (1.0 - x);
  double sum = 0.0;
  std::size_t used = 0, skipped = 0;
  for (std::size_t i = 0; i < iters; ++i) {
    const double slope = std::abs(r * (1.0 - 2.0 * x));
    if (slope == 0.0) {
      ++skipped;
    } else {
      sum += std::log(slope);
      ++used;
    }
    x = r * x * (1.0 - x);
  }
  if (used == 0) fail(Errc::numerical, "every Lyapunov term was singular");
  return {sum / static_cast<double>(used), skipped};
}

LyapunovTable::LyapunovTable(const DriftSchedule& schedule, std::size_t grid,
                             std::size_t transient, std::size_t iters) {
  schedule.validate();
  const double lo = std::min(schedule.r_start, schedule.r_end);
  const double hi = std::max(schedule.r_start, schedule.r_end);
  const std::size_t count = lo == hi ? 1 : std::max<std::size_t>(grid, 2);
  r_.resize(count);
  lambda_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    r_[i] = count == 1 ? lo
                       : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    lambda_[i] = lyapunov_exponent(r_[i], transient, iters).exponent;
  }
}

double LyapunovTable::exponent_at_r(double r) const noexcept {
  if (r_.size() == 1) return lambda_.front();
  const double step = (r_.back() - r_.front()) / static_cast<double>(r_.size() - 1);
  const double pos = std::round((r - r_.front()) / step);
  const auto i = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(r_.size() - 1)));
  return lambda_[i];
}

RegimeLabels ground_truth(const DriftSchedule& schedule, const LyapunovTable& table,
                          std::span<const double> times) {
  RegimeLabels out;
  out.times.assign(times.begin(), times.end());
  out.exponents.resize(times.size());
  out.labels.resize(times.size());
  out.marginal.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double lambda = table.exponent_at_r(schedule.r_at(times[i]));
    out.exponents[i] = lambda;
    // Zero exponent (bifurcation points) counts as non-chaotic.
    out.labels[i] = lambda > 0.0 ? Regime::chaotic : Regime::periodic;
    out.marginal[i] = std::abs(lambda) < LyapunovTable::marginal_band ? 1 : 0;
  }
  return out;
}

RegimeLabels ground_truth(const DriftSchedule& schedule) {
  const LyapunovTable table(schedule);
  std::vector<double> times(schedule.steps);
  for (std::size_t n = 0; n < times.size(); ++n) times[n] = static_cast<double>(n + 1);
  return ground_truth(schedule, table, times);
}

std::vector<Regime> classify_by_det(std::span<const double> values,
                                    std::span<const std::uint8_t> valid) {
  if (values.size() != valid.size()) fail(Errc::invalid_input, "values and mask differ in length");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid[i]) {
      sum += values[i];
      ++n;
    }
  }
  if (n < 2) fail(Errc::empty_series, "classification needs at least two valid values");
  const double mean = sum / static_cast<double>(n);
  std::vector<Regime> out(values.size(), Regime::unknown);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (valid[i]) out[i] = values[i] > mean ? Regime::periodic : Regime::chaotic;
  }
  return out;
}

std::vector<double> linear_interpolation_baseline(const IrregularSeries& series,
                                                  const RegularTimeline& tl) {
  const auto t = series.times();
  const auto x = series.values();
  std::vector<double> out(tl.count());
  for (std::size_t i = 0; i < tl.count(); ++i) {
    const double q = tl.at(i);
    if (q < t.front() || q > t.back()) fail(Errc::extrapolation, "timeline leaves the data span");
    const auto it = std::upper_bound(t.begin(), t.end(), q);
    const auto k = static_cast<std::size_t>(it - t.begin()) - 1;
    if (t[k] == q || k + 1 == t.size()) {
      out[i] = x[k];
    } else {
      out[i] = x[k] + (x[k + 1] - x[k]) * (q - t[k]) / (t[k + 1] - t[k]);
    }
  }
  return out;
}

double mismatch_ratio(std::span<const Regime> predicted, std::span<const Regime> truth) {
  if (predicted.size() != truth.size()) fail(Errc::timeline_mismatch, "labelings differ in length");
  std::size_t compared = 0, wrong = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == Regime::unknown || truth[i] == Regime::unknown) continue;
    ++compared;
    if (predicted[i] != truth[i]) ++wrong;
  }
  if (compared == 0) fail(Errc::empty_series, "labelings share no known point");
  return static_cast<double>(wrong) / static_cast<double>(compared);
}

std::vector<DistortionCell> default_distortion_grid() {
  std::vector<DistortionCell> cells;
  for (double removal : {0.0, 0.1, 0.2}) {
    for (double k : {0.1, 0.2, 0.3}) cells.push_back({removal, k});
  }
  return cells;
}

void BenchConfig::validate() const {
  schedule.validate();
  if (cells.empty()) fail(Errc::config, "benchmark needs at least one distortion cell");
  for (const auto& c : cells) DistortionConfig{c.removal, c.noise_K, 0}.validate();
  if (frames.empty()) fail(Errc::config, "benchmark needs at least one recurrence frame");
  for (double f : frames) {
    if (!(f > rec_step)) fail(Errc::config, "recurrence frames must exceed the recurrence step");
  }
  if (!(rec_step > 0.0)) fail(Errc::config, "recurrence step must be positive");
  if (omegas.empty() && !(omega_units_min > 0.0 && omega_units_max >= omega_units_min &&
                          omega_units_step > 0.0)) {
    fail(Errc::config, "invalid omega unit range");
  }
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (!(omegas[i] > omegas[i - 1])) fail(Errc::config, "omegas must be strictly increasing");
  }
  if (l_min < 1) fail(Errc::config, "l_min must be at least 1");
}

double BenchmarkReport::mean_error(std::size_t frame_index, bool tacts) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.error || frame_index >= c.frames.size()) continue;
    const double e = tacts ? c.frames[frame_index].e_tacts : c.frames[frame_index].e_interp;
    if (std::isnan(e)) continue;
    sum += e;
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : nan_value;
}

double BenchmarkReport::overall_mean_error(bool tacts) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : cells) {
    if (c.error) continue;
    for (const auto& f : c.frames) {
      const double e = tacts ? f.e_tacts : f.e_interp;
      if (std::isnan(e)) continue;
      sum += e;
      ++n;
    }
  }
  return n > 0 ? sum / static_cast<double>(n) : nan_value;
}

BenchmarkReport run_benchmark(const BenchConfig& config) {
  config.validate();
  BenchmarkReport report;
  report.frames = config.frames;
  {
    Rng rng(derive_seed(config.seed, 0xC0FFEEULL));
    report.x0 = 0.1 + 0.8 * uniform01(rng);
  }
  const IrregularSeries trajectory =
      logistic_trajectory(config.schedule, report.x0, config.transient);
  const LyapunovTable table(config.schedule);

  report.cells.resize(config.cells.size());
  parallel_for(config.cells.size(), config.workers, [&](std::size_t ci) {
    CellResult& cell = report.cells[ci];
    cell.cell = config.cells[ci];
    cell.seed = derive_seed(config.seed, ci);
    try {
      const IrregularSeries series =
          distort(trajectory, {cell.cell.removal, cell.cell.noise_K, cell.seed});
      cell.points = series.size();
      const SamplingStats stats = sampling_stats(series);
      const std::vector<double> omegas =
          config.omegas.empty()
              ? choose_omega_grid(stats, config.omega_units_min, config.omega_units_max,
                                  config.omega_units_step)
                    .omegas
              : config.omegas;

      const double omega_max = omegas.back();
      const double t0 = std::ceil(series.first_time() + omega_max);
      const double t_end = std::floor(series.last_time() - omega_max);
      if (!(t_end > t0)) fail(Errc::config, "series too short for the omega grid");
      const RegularTimeline tl(t0, 1.0, static_cast<std::size_t>(t_end - t0) + 1);

      SpectrumOptions sopts;
      sopts.tacts.order_preserving = config.order_preserving;
      const SpectrumBuild build = build_spectrum(series, tl, omegas, sopts);
      const Spectrum& spectrum = build.spectrum;
      cell.omegas = spectrum.omegas;
      for (const auto& m : spectrum.members) cell.lambdas.push_back(m.params.lambda);

      const std::vector<double> interp = linear_interpolation_baseline(series, tl);
      const std::vector<std::uint8_t> no_gaps(interp.size(), 0);
      const RegularSeriesView interp_view{tl, interp, no_gaps};

      const auto rec_count = static_cast<std::size_t>(std::floor((t_end - t0) / config.rec_step)) + 1;
      const RegularTimeline rec_tl(t0, config.rec_step, rec_count);
      const std::vector<double> rec_times = timeline_points(rec_tl);
      const RegimeLabels truth = ground_truth(config.schedule, table, rec_times);

      for (double frame : config.frames) {
        DetOptions dopts;
        dopts.frame = frame;
        dopts.eps_fraction = config.eps_fraction;
        dopts.l_min = config.l_min;
        dopts.include_loi = config.include_loi;
        dopts.min_points = config.min_points;

        std::vector<DetSeries> dets;
        dets.reserve(spectrum.size());
        for (const auto& m : spectrum.members) dets.push_back(det_or_invalid(m.view(), rec_tl, dopts));
        const SDetSeries spectrum_det = sdet(dets);
        const DetSeries interp_det = det_or_invalid(interp_view, rec_tl, dopts);

        FrameResult fr;
        fr.frame = frame;
        fr.rec_times = rec_times;
        fr.truth_exponent = truth.exponents;
        fr.truth = truth.labels;
        fr.sdet = spectrum_det.values;
        fr.interp_det = interp_det.values;
        fr.e_tacts = error_or_nan(spectrum_det.values, spectrum_det.valid, truth.labels,
                                  &fr.tacts_labels);
        fr.e_interp =
            error_or_nan(interp_det.values, interp_det.valid, truth.labels, &fr.interp_labels);
        for (const auto& d : dets) {
          fr.e_members.push_back(error_or_nan(d.values, d.valid, truth.labels));
          if (config.keep_member_det) fr.member_det.push_back(d.values);
        }
        cell.frames.push_back(std::move(fr));
      }
    } catch (const Error& e) {
      cell.error = e.what();
      cell.frames.clear();
    }
  });
  return report;
}

}  // namespace tacts
