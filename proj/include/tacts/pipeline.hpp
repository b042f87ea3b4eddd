#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tacts/logistic.hpp"
#include "tacts/series.hpp"

namespace tacts {

/// Unset fields are derived from the data: start at the first sample, the
/// mean sampling step, and as many points as fit inside the data span.
struct TimelineSpec {
  std::optional<double> t0;
  std::optional<double> step;
  std::optional<std::size_t> count;
};

struct RunConfig {
  std::filesystem::path input;
  TimelineSpec tacts;
  double omega_units_min = 3.0;
  double omega_units_max = 12.0;
  double omega_units_step = 0.5;
  std::vector<double> omega_list;  // overrides the unit grid when non-empty
  std::optional<double> fixed_lambda;
  TimelineSpec rec;                // defaults follow the TACTS timeline
  std::optional<double> frame;     // defaults to 50 TACTS steps
  double eps_fraction = 0.1;
  std::size_t l_min = 2;
  bool include_loi = true;
  std::size_t min_points = 10;
  std::size_t n_surrogates = 1000;  // 0 disables the bootstrap band
  double q_low = 0.01;
  double q_high = 0.99;
  std::uint64_t seed = 1;
  bool order_preserving = false;
  std::size_t workers = 1;
  std::filesystem::path out_dir = ".";
  bool keep_partial = false;

  void validate() const;
};

/// Ordered key-value record of a run.
class RunManifest {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  const std::string* find(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }
  std::string render() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

using Logger = std::function<void(std::string_view)>;

std::string_view software_version() noexcept;

/// Spectrum, DET per member, SDET with bootstrap band; writes spectrum.csv,
/// det.csv, sdet.csv and manifest.txt into cfg.out_dir.
RunManifest run_analysis(const RunConfig& cfg, const Logger& log = {});

struct CalibrationRow {
  double omega = 0.0;
  double units = 0.0;
  double lambda_x = 0.0;
  double lambda_t = 0.0;
  double lambda = 0.0;
  double ks = 0.0;
  std::size_t gaps = 0;
  std::optional<std::string> error;
};

std::vector<CalibrationRow> run_calibration(const RunConfig& cfg, const Logger& log = {});
std::string render_calibration(const std::vector<CalibrationRow>& rows);

struct BenchRunConfig {
  BenchConfig bench;
  std::filesystem::path out_dir = ".";
  bool keep_partial = false;
};

/// Writes bench_report.csv, bench_members.csv, bench_manifest.txt and one
/// cell_<i>.csv dump per distortion cell.
BenchmarkReport run_logistic_bench(const BenchRunConfig& cfg, const Logger& log = {});

std::string_view to_string(Regime r) noexcept;

}  // namespace tacts
