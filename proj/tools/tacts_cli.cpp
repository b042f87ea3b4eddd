#include <charconv>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tacts/error.hpp"
#include "tacts/pipeline.hpp"

namespace {

int exit_code(tacts::ErrorClass c) {
  switch (c) {
    case tacts::ErrorClass::config: return 2;
    case tacts::ErrorClass::data: return 3;
    case tacts::ErrorClass::numerical: return 4;
  }
  return 4;
}

void emit_error(std::string_view code, std::string_view cls, std::string_view message) {
  nlohmann::json rec = {{"error", code}, {"class", cls}, {"message", message}};
  std::cerr << rec.dump() << '\n';
}

double to_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    tacts::fail(tacts::Errc::config, "cannot parse " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_triple(std::string_view s, std::string_view what) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) tacts::fail(tacts::Errc::config, std::string(what) + " must be MIN:MAX:STEP");
  return {to_double(parts[0], what), to_double(parts[1], what), to_double(parts[2], what)};
}

std::pair<double, double> parse_pair(std::string_view s, std::string_view what) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) tacts::fail(tacts::Errc::config, std::string(what) + " must be LO:HI");
  return {to_double(parts[0], what), to_double(parts[1], what)};
}

std::vector<double> parse_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  for (auto part : split(s, ',')) out.push_back(to_double(part, what));
  return out;
}

tacts::DistortionCell parse_cell(std::string_view s) {
  tacts::DistortionCell cell;
  bool have_removal = false, have_k = false;
  for (auto part : split(s, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) tacts::fail(tacts::Errc::config, "cell entries must be key=value");
    const auto key = part.substr(0, eq);
    const double v = to_double(part.substr(eq + 1), "cell value");
    if (key == "removal") {
      cell.removal = v;
      have_removal = true;
    } else if (key == "K") {
      cell.noise_K = v;
      have_k = true;
    } else {
      tacts::fail(tacts::Errc::config, "unknown cell key '" + std::string(key) + "'");
    }
  }
  if (!have_removal || !have_k) tacts::fail(tacts::Errc::config, "a cell needs removal= and K=");
  return cell;
}

struct Raw {
  std::string input;
  std::optional<double> t0, dt;
  std::optional<std::size_t> count;
  std::string omega_units, omega_list;
  std::optional<double> lambda;
  std::optional<double> frame, rec_t0, rec_step;
  std::optional<std::size_t> rec_count;
  double eps_frac = 0.1;
  std::size_t lmin = 2;
  std::size_t surrogates = 1000;
  std::string quantiles = "0.01:0.99";
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out_dir = ".";
  bool include_loi = true;
  bool dp_approx = false;
  bool keep_partial = false;
  std::vector<std::string> cells;
  std::string frames;
};

void add_common(CLI::App* app, Raw& raw) {
  app->add_option("--omega-units", raw.omega_units, "omega grid in mean-step units, MIN:MAX:STEP");
  app->add_option("--eps-frac", raw.eps_frac, "recurrence threshold as a fraction of the series std")
      ->capture_default_str();
  app->add_option("--lmin", raw.lmin, "minimal diagonal line length")->capture_default_str();
  app->add_option("--seed", raw.seed, "top-level random seed")->capture_default_str();
  app->add_option("--workers", raw.workers, "worker threads")->capture_default_str();
  app->add_option("--out-dir", raw.out_dir, "output directory")->capture_default_str();
  app->add_option("--include-loi", raw.include_loi, "count the line of identity")->capture_default_str();
  app->add_option("--dp-approx", raw.dp_approx, "order-preserving approximate costs")->capture_default_str();
  app->add_flag("--keep-partial", raw.keep_partial, "write each table as soon as it is ready");
}

void add_series(CLI::App* app, Raw& raw) {
  app->add_option("--input", raw.input, "two-column time,value file")->required();
  app->add_option("--t0", raw.t0, "first TACTS time");
  app->add_option("--dt", raw.dt, "TACTS step");
  app->add_option("--count", raw.count, "TACTS point count");
  app->add_option("--omega-list", raw.omega_list, "explicit comma-separated omegas");
  app->add_option("--lambda", raw.lambda, "fixed lambda instead of the KS search");
}

tacts::RunConfig to_run_config(const Raw& raw) {
  tacts::RunConfig cfg;
  cfg.input = raw.input;
  cfg.tacts = {raw.t0, raw.dt, raw.count};
  if (!raw.omega_units.empty()) {
    const auto u = parse_triple(raw.omega_units, "--omega-units");
    cfg.omega_units_min = u[0];
    cfg.omega_units_max = u[1];
    cfg.omega_units_step = u[2];
  }
  if (!raw.omega_list.empty()) cfg.omega_list = parse_list(raw.omega_list, "--omega-list");
  cfg.fixed_lambda = raw.lambda;
  cfg.rec = {raw.rec_t0, raw.rec_step, raw.rec_count};
  cfg.frame = raw.frame;
  cfg.eps_fraction = raw.eps_frac;
  cfg.l_min = raw.lmin;
  cfg.include_loi = raw.include_loi;
  cfg.n_surrogates = raw.surrogates;
  std::tie(cfg.q_low, cfg.q_high) = parse_pair(raw.quantiles, "--quantiles");
  cfg.seed = raw.seed;
  cfg.order_preserving = raw.dp_approx;
  cfg.workers = raw.workers;
  cfg.out_dir = raw.out_dir;
  cfg.keep_partial = raw.keep_partial;
  return cfg;
}

tacts::BenchRunConfig to_bench_config(const Raw& raw) {
  tacts::BenchRunConfig cfg;
  auto& b = cfg.bench;
  if (!raw.omega_units.empty()) {
    const auto u = parse_triple(raw.omega_units, "--omega-units");
    b.omega_units_min = u[0];
    b.omega_units_max = u[1];
    b.omega_units_step = u[2];
  }
  if (!raw.cells.empty()) {
    b.cells.clear();
    for (const auto& c : raw.cells) b.cells.push_back(parse_cell(c));
  }
  if (!raw.frames.empty()) b.frames = parse_list(raw.frames, "--frames");
  if (raw.rec_step) b.rec_step = *raw.rec_step;
  b.eps_fraction = raw.eps_frac;
  b.l_min = raw.lmin;
  b.include_loi = raw.include_loi;
  b.order_preserving = raw.dp_approx;
  b.seed = raw.seed;
  b.workers = raw.workers;
  cfg.out_dir = raw.out_dir;
  cfg.keep_partial = raw.keep_partial;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transformation-cost regularization and recurrence analysis of irregular series"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tacts::software_version()));
  Raw raw;

  auto* analyze = app.add_subcommand("analyze", "cost spectrum, determinism and significance");
  add_series(analyze, raw);
  add_common(analyze, raw);
  analyze->add_option("--frame-L", raw.frame, "recurrence frame size in time units");
  analyze->add_option("--rec-t0", raw.rec_t0, "first recurrence time");
  analyze->add_option("--rec-step", raw.rec_step, "recurrence step");
  analyze->add_option("--rec-count", raw.rec_count, "recurrence point count");
  analyze->add_option("--surrogates", raw.surrogates, "bootstrap surrogates, 0 to skip")
      ->capture_default_str();
  analyze->add_option("--quantiles", raw.quantiles, "band quantiles LO:HI")->capture_default_str();

  auto* calibrate = app.add_subcommand("calibrate", "print the per-omega calibration");
  add_series(calibrate, raw);
  add_common(calibrate, raw);

  auto* bench = app.add_subcommand("bench", "logistic-map regime detection benchmark");
  add_common(bench, raw);
  bench->add_option("--cells", raw.cells, "distortion cell removal=R,K=K (repeatable)");
  bench->add_option("--frames", raw.frames, "comma-separated recurrence frame sizes");
  bench->add_option("--rec-step", raw.rec_step, "recurrence step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("config", "config", e.what());
    return 2;
  }

  const tacts::Logger log = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  try {
    if (analyze->parsed()) {
      const auto manifest = tacts::run_analysis(to_run_config(raw), log);
      const auto* n = manifest.find("n_rho_star");
      std::cout << "wrote " << raw.out_dir << " (valid recurrence points: " << (n ? *n : "?") << ")\n";
    } else if (calibrate->parsed()) {
      std::cout << tacts::render_calibration(tacts::run_calibration(to_run_config(raw), log));
    } else if (bench->parsed()) {
      const auto report = tacts::run_logistic_bench(to_bench_config(raw), log);
      std::cout << "mean E tacts=" << report.overall_mean_error(true)
                << " interp=" << report.overall_mean_error(false) << '\n';
    }
  } catch (const tacts::Error& e) {
    const auto cls = tacts::classify(e.code());
    emit_error(tacts::to_string(e.code()), tacts::to_string(cls), e.what());
    return exit_code(cls);
  } catch (const std::exception& e) {
    emit_error("internal", "numerical", e.what());
    return 4;
  }
  return 0;
}
