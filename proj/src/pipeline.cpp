#include "tacts/pipeline.hpp"

#include <cmath>
#include <limits>

#include "tacts/error.hpp"
#include "tacts/io.hpp"
#include "tacts/random.hpp"
#include "tacts/rqa.hpp"
#include "tacts/spectrum.hpp"

#ifndef TACTS_VERSION
#define TACTS_VERSION "unknown"
#endif

namespace tacts {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

// Stream index reserved for the bootstrap, distinct from per-member indices.
constexpr std::uint64_t bootstrap_stream = 0xB007;

void check_timeline_spec(const TimelineSpec& spec, std::string_view name) {
  if (spec.t0 && !std::isfinite(*spec.t0)) fail(Errc::config, std::string(name) + " t0 must be finite");
  if (spec.step && !(*spec.step > 0.0 && std::isfinite(*spec.step))) {
    fail(Errc::config, std::string(name) + " step must be positive");
  }
  if (spec.count && *spec.count == 0) fail(Errc::config, std::string(name) + " count must be >= 1");
}

RegularTimeline resolve_timeline(const TimelineSpec& spec, double default_t0, double default_step,
                                 double span_end, std::string_view name) {
  const double t0 = spec.t0.value_or(default_t0);
  const double step = spec.step.value_or(default_step);
  if (!(step > 0.0)) fail(Errc::config, std::string(name) + " step resolved to a non-positive value");
  std::size_t count = 0;
  if (spec.count) {
    count = *spec.count;
  } else {
    if (t0 > span_end) fail(Errc::config, std::string(name) + " timeline starts after the data span");
    count = static_cast<std::size_t>(std::floor((span_end - t0) / step + 1e-9)) + 1;
  }
  return RegularTimeline(t0, step, count);
}

std::string column_suffix(double omega) { return "w" + format_number(omega); }

std::string flag_name(Significance s) {
  switch (s) {
    case Significance::high: return "high";
    case Significance::low: return "low";
    case Significance::none: break;
  }
  return "none";
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

struct Prepared {
  IrregularSeries series;
  SamplingStats stats;
  RegularTimeline tacts_tl;
  std::vector<double> omegas;
  OmegaGrid grid;
};

Prepared prepare(const RunConfig& cfg, const Logger& log) {
  cfg.validate();
  LoadedSeries loaded = load_series(cfg.input);
  if (log) {
    for (const auto& w : loaded.warnings) log(w);
  }
  IrregularSeries series = std::move(loaded.series);
  if (series.size() < 2) fail(Errc::invalid_input, "input needs at least two samples");
  const SamplingStats stats = sampling_stats(series);
  const RegularTimeline tl =
      resolve_timeline(cfg.tacts, series.first_time(), stats.mean_dt, series.last_time(), "tacts");
  OmegaGrid grid;
  std::vector<double> omegas = cfg.omega_list;
  if (omegas.empty()) {
    grid = choose_omega_grid(stats, cfg.omega_units_min, cfg.omega_units_max, cfg.omega_units_step);
    omegas = grid.omegas;
  }
  return {std::move(series), stats, tl, std::move(omegas), std::move(grid)};
}

void record_common(RunManifest& m, const RunConfig& cfg, const Prepared& p) {
  m.set("software", "tacts " + std::string(software_version()));
  m.set("input", cfg.input.string());
  m.set("input_points", std::to_string(p.series.size()));
  m.set("input_first_time", p.series.first_time());
  m.set("input_last_time", p.series.last_time());
  m.set("input_mean_dt", p.stats.mean_dt);
  m.set("input_std_dt", p.stats.std_dt);
  m.set("tacts_t0", p.tacts_tl.t0());
  m.set("tacts_step", p.tacts_tl.step());
  m.set("tacts_count", std::to_string(p.tacts_tl.count()));
  if (cfg.omega_list.empty()) {
    m.set("omega_units", format_number(cfg.omega_units_min) + ":" + format_number(cfg.omega_units_max) +
                             ":" + format_number(cfg.omega_units_step));
  } else {
    std::string list;
    for (double w : cfg.omega_list) list += (list.empty() ? "" : ",") + format_number(w);
    m.set("omega_list", list);
  }
  m.set("omega_count", std::to_string(p.omegas.size()));
  m.set("lambda_policy", cfg.fixed_lambda ? "fixed:" + format_number(*cfg.fixed_lambda) : "ks_grid");
  m.set("dp_approx", bool_text(cfg.order_preserving));
}

void record_members(RunManifest& m, const SpectrumBuild& build) {
  const auto& members = build.spectrum.members;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& c = members[i];
    const std::string k = "member." + std::to_string(i) + ".";
    m.set(k + "omega", c.params.omega);
    m.set(k + "lambda", c.params.lambda);
    m.set(k + "lambda_x", c.params.lambda_x);
    m.set(k + "lambda_t", c.params.lambda_t);
    m.set(k + "ks", c.ks_stat);
    m.set(k + "gaps", std::to_string(c.gap_count()));
    m.set(k + "gap_runs", std::to_string(c.gap_runs()));
  }
  for (std::size_t i = 0; i < build.failures.size(); ++i) {
    const auto& f = build.failures[i];
    const std::string k = "dropped." + std::to_string(i) + ".";
    m.set(k + "omega", f.omega);
    m.set(k + "code", std::string(to_string(f.code)));
    m.set(k + "message", f.message);
  }
}

SpectrumBuild build(const RunConfig& cfg, const Prepared& p) {
  SpectrumOptions opts;
  opts.tacts.fixed_lambda = cfg.fixed_lambda;
  opts.tacts.order_preserving = cfg.order_preserving;
  opts.workers = cfg.workers;
  return build_spectrum(p.series, p.tacts_tl, p.omegas, opts);
}

DetSeries det_or_invalid(const RegularSeriesView& view, const RegularTimeline& rec_tl,
                         const DetOptions& opts) {
  try {
    return det_series(view, rec_tl, opts);
  } catch (const Error& e) {
    if (e.code() != Errc::empty_series) throw;
    return DetSeries{rec_tl, std::vector<double>(rec_tl.count(), nan_value),
                     std::vector<std::uint8_t>(rec_tl.count(), 0), opts.frame, opts.eps_fraction,
                     0.0, opts.l_min, 0, {}};
  }
}

class OutputSink {
 public:
  OutputSink(std::filesystem::path dir, bool immediate) : dir_(std::move(dir)), immediate_(immediate) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(Errc::io, "cannot create " + dir_.string() + ": " + ec.message());
  }
  void add(std::string name, std::string content) {
    if (immediate_) {
      write_file(dir_ / name, content);
    } else {
      pending_.emplace_back(std::move(name), std::move(content));
    }
  }
  void flush() {
    for (const auto& [name, content] : pending_) write_file(dir_ / name, content);
    pending_.clear();
  }

 private:
  std::filesystem::path dir_;
  bool immediate_;
  std::vector<std::pair<std::string, std::string>> pending_;
};

}  // namespace

std::string_view software_version() noexcept { return TACTS_VERSION; }

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::chaotic: return "chaotic";
    case Regime::periodic: return "periodic";
    case Regime::unknown: break;
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (input.empty()) fail(Errc::config, "an input file is required");
  check_timeline_spec(tacts, "tacts");
  check_timeline_spec(rec, "recurrence");
  if (omega_list.empty()) {
    if (!(omega_units_min > 0.0 && omega_units_max >= omega_units_min && omega_units_step > 0.0)) {
      fail(Errc::config, "omega units need 0 < min <= max and step > 0");
    }
  }
  for (std::size_t i = 0; i < omega_list.size(); ++i) {
    if (!(omega_list[i] > 0.0 && std::isfinite(omega_list[i]))) fail(Errc::config, "omegas must be positive");
    if (i > 0 && !(omega_list[i] > omega_list[i - 1])) {
      fail(Errc::config, "omega list must be strictly increasing");
    }
  }
  if (fixed_lambda && !(*fixed_lambda > 0.0 && std::isfinite(*fixed_lambda))) {
    fail(Errc::config, "lambda must be positive");
  }
  if (frame && !(*frame > 0.0 && std::isfinite(*frame))) fail(Errc::config, "frame L must be positive");
  if (!(eps_fraction > 0.0 && std::isfinite(eps_fraction))) fail(Errc::config, "eps fraction must be positive");
  if (l_min < 1) fail(Errc::config, "l_min must be at least 1");
  if (min_points < 2) fail(Errc::config, "windows need at least two points");
  if (n_surrogates != 0 && n_surrogates < 100) {
    fail(Errc::config, "surrogate count must be 0 or at least 100");
  }
  if (!(0.0 <= q_low && q_low < q_high && q_high <= 1.0)) {
    fail(Errc::config, "quantiles must satisfy 0 <= low < high <= 1");
  }
  if (workers < 1) fail(Errc::config, "workers must be at least 1");
}

void RunManifest::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

void RunManifest::set(std::string key, double value) { set(std::move(key), format_number(value)); }

const std::string* RunManifest::find(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string RunManifest::render() const {
  std::string out = "# tacts run manifest: key=value\n";
  for (const auto& [k, v] : entries_) out += k + "=" + v + "\n";
  return out;
}

RunManifest run_analysis(const RunConfig& cfg, const Logger& log) {
  const Prepared p = prepare(cfg, log);
  const RegularTimeline rec_tl =
      resolve_timeline(cfg.rec, p.tacts_tl.t0(), p.tacts_tl.step(), p.tacts_tl.back(), "recurrence");
  const double frame = cfg.frame.value_or(50.0 * p.tacts_tl.step());
  OutputSink sink(cfg.out_dir, cfg.keep_partial);

  RunManifest manifest;
  record_common(manifest, cfg, p);
  manifest.set("rec_t0", rec_tl.t0());
  manifest.set("rec_step", rec_tl.step());
  manifest.set("rec_count", std::to_string(rec_tl.count()));
  manifest.set("frame_L", frame);
  manifest.set("eps_fraction", cfg.eps_fraction);
  manifest.set("l_min", std::to_string(cfg.l_min));
  manifest.set("include_loi", bool_text(cfg.include_loi));
  manifest.set("min_points", std::to_string(cfg.min_points));
  manifest.set("surrogates", std::to_string(cfg.n_surrogates));
  manifest.set("q_low", cfg.q_low);
  manifest.set("q_high", cfg.q_high);
  manifest.set("seed", std::to_string(cfg.seed));
  const std::uint64_t boot_seed = derive_seed(cfg.seed, bootstrap_stream);
  manifest.set("bootstrap_seed", std::to_string(boot_seed));

  const SpectrumBuild built = build(cfg, p);
  const Spectrum& spectrum = built.spectrum;
  record_members(manifest, built);
  if (log) {
    for (const auto& f : built.failures) {
      log("dropped omega " + format_number(f.omega) + ": " + f.message);
    }
  }
  {
    CsvTable table;
    table.add_column("t", timeline_points(spectrum.timeline));
    for (const auto& m : spectrum.members) table.add_column("cost_" + column_suffix(m.params.omega), m.costs);
    for (const auto& m : spectrum.members) {
      std::vector<std::string> flags;
      for (auto g : m.gap_mask) flags.push_back(g ? "1" : "0");
      table.add_column("gap_" + column_suffix(m.params.omega), std::move(flags));
    }
    sink.add("spectrum.csv", table.render());
  }

  DetOptions dopts;
  dopts.frame = frame;
  dopts.eps_fraction = cfg.eps_fraction;
  dopts.l_min = cfg.l_min;
  dopts.include_loi = cfg.include_loi;
  dopts.min_points = cfg.min_points;
  dopts.keep_histograms = cfg.n_surrogates > 0;
  dopts.workers = cfg.workers;
  std::vector<DetSeries> dets;
  dets.reserve(spectrum.size());
  for (const auto& m : spectrum.members) dets.push_back(det_or_invalid(m.view(), rec_tl, dopts));
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const std::string k = "member." + std::to_string(i) + ".";
    manifest.set(k + "det_eps", dets[i].eps);
    manifest.set(k + "det_valid", std::to_string(dets[i].valid_count()));
    manifest.set(k + "det_complete_windows", std::to_string(dets[i].complete_windows));
  }
  {
    CsvTable table;
    table.add_column("t", timeline_points(rec_tl));
    for (std::size_t i = 0; i < dets.size(); ++i) {
      table.add_column("det_" + column_suffix(spectrum.members[i].params.omega), dets[i].values);
    }
    for (std::size_t i = 0; i < dets.size(); ++i) {
      std::vector<std::string> flags;
      for (auto v : dets[i].valid) flags.push_back(v ? "1" : "0");
      table.add_column("valid_" + column_suffix(spectrum.members[i].params.omega), std::move(flags));
    }
    sink.add("det.csv", table.render());
  }

  SDetSeries combined = sdet(dets);
  std::vector<DetSeries> usable;
  std::vector<double> usable_omega;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].valid_count() == 0) continue;
    usable.push_back(dets[i]);
    usable_omega.push_back(spectrum.members[i].params.omega);
  }
  if (cfg.n_surrogates > 0 && !usable.empty()) {
    BootstrapOptions bopts;
    bopts.n_surrogates = cfg.n_surrogates;
    bopts.q_low = cfg.q_low;
    bopts.q_high = cfg.q_high;
    bopts.seed = boot_seed;
    bopts.l_min = cfg.l_min;
    const BootstrapBand band = bootstrap_band(usable, bopts);
    attach_band(combined, band);
    for (std::size_t i = 0; i < band.members.size(); ++i) {
      const std::string k = "band." + std::to_string(i) + ".";
      manifest.set(k + "omega", usable_omega[i]);
      manifest.set(k + "low", band.members[i].low);
      manifest.set(k + "high", band.members[i].high);
      manifest.set(k + "structures", std::to_string(band.members[i].structures));
      manifest.set(k + "collapsed", bool_text(band.members[i].collapsed));
    }
  }
  {
    CsvTable table;
    table.add_column("t", timeline_points(rec_tl));
    table.add_column("sdet", combined.values);
    std::vector<std::string> counts;
    for (auto c : combined.member_count) counts.push_back(std::to_string(c));
    table.add_column("members", std::move(counts));
    const std::vector<double> empty(rec_tl.count(), nan_value);
    table.add_column("ci_low", combined.ci_low.empty() ? empty : combined.ci_low);
    table.add_column("ci_high", combined.ci_high.empty() ? empty : combined.ci_high);
    std::vector<std::string> flags;
    for (auto f : combined.flags) flags.push_back(flag_name(f));
    table.add_column("flag", std::move(flags));
    sink.add("sdet.csv", table.render());
  }

  manifest.set("n_rho", std::to_string(rec_tl.count()));
  manifest.set("n_rho_star", std::to_string(combined.valid_count()));
  std::size_t high = 0, low = 0;
  for (auto f : combined.flags) {
    high += f == Significance::high;
    low += f == Significance::low;
  }
  manifest.set("flags_high", std::to_string(high));
  manifest.set("flags_low", std::to_string(low));
  sink.add("manifest.txt", manifest.render());
  sink.flush();
  return manifest;
}

std::vector<CalibrationRow> run_calibration(const RunConfig& cfg, const Logger& log) {
  const Prepared p = prepare(cfg, log);
  const SpectrumBuild built = build(cfg, p);
  const double dt = p.stats.mean_dt;
  std::vector<CalibrationRow> rows;
  for (const auto& m : built.spectrum.members) {
    rows.push_back({m.params.omega, m.params.omega / dt, m.params.lambda_x, m.params.lambda_t,
                    m.params.lambda, m.ks_stat, m.gap_count(), std::nullopt});
  }
  for (const auto& f : built.failures) {
    CalibrationRow row;
    row.omega = f.omega;
    row.units = f.omega / dt;
    row.lambda_x = row.lambda_t = row.lambda = row.ks = nan_value;
    row.error = std::string(to_string(f.code)) + ": " + f.message;
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const CalibrationRow& a, const CalibrationRow& b) { return a.omega < b.omega; });
  return rows;
}

std::string render_calibration(const std::vector<CalibrationRow>& rows) {
  CsvTable table;
  std::vector<double> omega, units, lx, lt, lam, ks;
  std::vector<std::string> gaps, err;
  for (const auto& r : rows) {
    omega.push_back(r.omega);
    units.push_back(r.units);
    lx.push_back(r.lambda_x);
    lt.push_back(r.lambda_t);
    lam.push_back(r.lambda);
    ks.push_back(r.ks);
    gaps.push_back(std::to_string(r.gaps));
    err.push_back(r.error ? "\"" + *r.error + "\"" : "");
  }
  table.add_column("omega", omega);
  table.add_column("omega_units", units);
  table.add_column("lambda_x", lx);
  table.add_column("lambda_t", lt);
  table.add_column("lambda", lam);
  table.add_column("ks", ks);
  table.add_column("gaps", std::move(gaps));
  table.add_column("error", std::move(err));
  return table.render();
}

BenchmarkReport run_logistic_bench(const BenchRunConfig& cfg, const Logger& log) {
  cfg.bench.validate();
  OutputSink sink(cfg.out_dir, cfg.keep_partial);
  const BenchmarkReport report = run_benchmark(cfg.bench);
  const BenchConfig& b = cfg.bench;

  {
    std::vector<std::string> method, removal, noise, frame, err;
    for (const auto& cell : report.cells) {
      for (std::size_t f = 0; f < report.frames.size(); ++f) {
        for (const bool tacts : {true, false}) {
          method.emplace_back(tacts ? "tacts" : "interp");
          removal.push_back(format_number(cell.cell.removal));
          noise.push_back(format_number(cell.cell.noise_K));
          frame.push_back(format_number(report.frames[f]));
          double e = nan_value;
          if (!cell.error) e = tacts ? cell.frames[f].e_tacts : cell.frames[f].e_interp;
          err.push_back(format_number(e));
        }
      }
    }
    CsvTable table;
    table.add_column("method", std::move(method));
    table.add_column("removal", std::move(removal));
    table.add_column("noise_K", std::move(noise));
    table.add_column("L", std::move(frame));
    table.add_column("E", std::move(err));
    sink.add("bench_report.csv", table.render());
  }
  {
    std::vector<std::string> removal, noise, frame, omega, err;
    for (const auto& cell : report.cells) {
      if (cell.error) continue;
      for (const auto& fr : cell.frames) {
        for (std::size_t i = 0; i < fr.e_members.size(); ++i) {
          removal.push_back(format_number(cell.cell.removal));
          noise.push_back(format_number(cell.cell.noise_K));
          frame.push_back(format_number(fr.frame));
          omega.push_back(format_number(cell.omegas[i]));
          err.push_back(format_number(fr.e_members[i]));
        }
      }
    }
    CsvTable table;
    table.add_column("removal", std::move(removal));
    table.add_column("noise_K", std::move(noise));
    table.add_column("L", std::move(frame));
    table.add_column("omega", std::move(omega));
    table.add_column("E", std::move(err));
    sink.add("bench_members.csv", table.render());
  }
  for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
    const CellResult& cell = report.cells[ci];
    if (cell.error) {
      if (log) log("cell " + std::to_string(ci) + " failed: " + *cell.error);
      continue;
    }
    std::vector<std::string> frame, t, r, lyap, truth, sd, tl, idet, il;
    for (const auto& fr : cell.frames) {
      for (std::size_t i = 0; i < fr.rec_times.size(); ++i) {
        frame.push_back(format_number(fr.frame));
        t.push_back(format_number(fr.rec_times[i]));
        r.push_back(format_number(b.schedule.r_at(fr.rec_times[i])));
        lyap.push_back(format_number(fr.truth_exponent[i]));
        truth.emplace_back(to_string(fr.truth[i]));
        sd.push_back(format_number(fr.sdet[i]));
        tl.emplace_back(to_string(fr.tacts_labels[i]));
        idet.push_back(format_number(fr.interp_det[i]));
        il.emplace_back(to_string(fr.interp_labels[i]));
      }
    }
    CsvTable table;
    table.add_column("L", std::move(frame));
    table.add_column("t", std::move(t));
    table.add_column("r", std::move(r));
    table.add_column("lyapunov", std::move(lyap));
    table.add_column("truth", std::move(truth));
    table.add_column("sdet", std::move(sd));
    table.add_column("tacts_label", std::move(tl));
    table.add_column("interp_det", std::move(idet));
    table.add_column("interp_label", std::move(il));
    sink.add("cell_" + std::to_string(ci) + ".csv", table.render());
  }

  RunManifest m;
  m.set("software", "tacts " + std::string(software_version()));
  m.set("r_start", b.schedule.r_start);
  m.set("r_end", b.schedule.r_end);
  m.set("steps", std::to_string(b.schedule.steps));
  m.set("transient", std::to_string(b.transient));
  m.set("seed", std::to_string(b.seed));
  m.set("x0", report.x0);
  m.set("rec_step", b.rec_step);
  m.set("eps_fraction", b.eps_fraction);
  m.set("l_min", std::to_string(b.l_min));
  m.set("include_loi", bool_text(b.include_loi));
  m.set("min_points", std::to_string(b.min_points));
  m.set("dp_approx", bool_text(b.order_preserving));
  if (b.omegas.empty()) {
    m.set("omega_units", format_number(b.omega_units_min) + ":" + format_number(b.omega_units_max) + ":" +
                             format_number(b.omega_units_step));
  }
  for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
    const CellResult& cell = report.cells[ci];
    const std::string k = "cell." + std::to_string(ci) + ".";
    m.set(k + "removal", cell.cell.removal);
    m.set(k + "noise_K", cell.cell.noise_K);
    m.set(k + "seed", std::to_string(cell.seed));
    m.set(k + "points", std::to_string(cell.points));
    if (cell.error) m.set(k + "error", *cell.error);
    for (std::size_t i = 0; i < cell.omegas.size(); ++i) {
      m.set(k + "omega." + std::to_string(i), cell.omegas[i]);
      m.set(k + "lambda." + std::to_string(i), cell.lambdas[i]);
    }
  }
  m.set("mean_E_tacts", report.overall_mean_error(true));
  m.set("mean_E_interp", report.overall_mean_error(false));
  sink.add("bench_manifest.txt", m.render());
  sink.flush();
  return report;
}

}  // namespace tacts
