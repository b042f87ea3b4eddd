#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tacts/rqa.hpp"
#include "tacts/series.hpp"

namespace tacts {

/// Linear ramp of the logistic control parameter: r_n = r_start + (r_end - r_start) * n / steps.
struct DriftSchedule {
  double r_start = 3.5;
  double r_end = 4.0;
  std::size_t steps = 20000;

  double r_at(double n) const noexcept {
    return r_start + (r_end - r_start) * n / static_cast<double>(steps);
  }
  void validate() const;
};

/// x_{n+1} = r_n x_n (1 - x_n); records x_1..x_N at integer times 1..N
/// after `transient` burn-in iterations at r_start.
IrregularSeries logistic_trajectory(const DriftSchedule& schedule, double x0,
                                    std::size_t transient = 1000);

struct DistortionConfig {
  double removal = 0.0;  // fraction of points removed, in [0, 1)
  double noise_K = 0.0;  // uniform noise bound as a fraction of the series std
  std::uint64_t seed = 0;

  void validate() const;
};

IrregularSeries distort(const IrregularSeries& series, const DistortionConfig& config);

struct LyapunovEstimate {
  double exponent = 0.0;
  std::size_t skipped = 0;  // orbit points at exactly x = 1/2
};

LyapunovEstimate lyapunov_exponent(double r, std::size_t transient = 1000,
                                   std::size_t iters = 10000, double x0 = 0.3);

enum class Regime : std::uint8_t { chaotic = 0, periodic = 1, unknown = 2 };

struct RegimeLabels {
  std::vector<double> times;
  std::vector<double> exponents;
  std::vector<Regime> labels;
  std::vector<std::uint8_t> marginal;  // |exponent| inside the dead band
};

/// Lyapunov exponents on an evenly spaced r grid, looked up by nearest r.
class LyapunovTable {
 public:
  static constexpr double marginal_band = 1e-3;

  explicit LyapunovTable(const DriftSchedule& schedule, std::size_t grid = 2000,
                         std::size_t transient = 1000, std::size_t iters = 10000);

  double exponent_at_r(double r) const noexcept;
  std::span<const double> r_grid() const noexcept { return r_; }
  std::span<const double> exponents() const noexcept { return lambda_; }

 private:
  std::vector<double> r_;
  std::vector<double> lambda_;
};

RegimeLabels ground_truth(const DriftSchedule& schedule, const LyapunovTable& table,
                          std::span<const double> times);
/// Labels at the recorded times 1..N.
RegimeLabels ground_truth(const DriftSchedule& schedule);

/// Periodic where the value exceeds the mean of the valid values.
std::vector<Regime> classify_by_det(std::span<const double> values,
                                    std::span<const std::uint8_t> valid);

std::vector<double> linear_interpolation_baseline(const IrregularSeries& series,
                                                  const RegularTimeline& tl);

/// Fraction of disagreements over points where both labelings are known.
double mismatch_ratio(std::span<const Regime> predicted, std::span<const Regime> truth);

struct DistortionCell {
  double removal = 0.0;
  double noise_K = 0.0;
};

std::vector<DistortionCell> default_distortion_grid();

struct BenchConfig {
  DriftSchedule schedule;
  std::size_t transient = 1000;
  std::uint64_t seed = 1;
  std::vector<DistortionCell> cells = default_distortion_grid();
  std::vector<double> frames = {50, 100, 150, 200, 300, 400, 600, 800, 1000};
  // Segment widths in multiples of the mean sampling step, unless omegas is set.
  double omega_units_min = 3.0;
  double omega_units_max = 12.0;
  double omega_units_step = 0.5;
  std::vector<double> omegas;
  double rec_step = 10.0;
  double eps_fraction = 0.1;
  std::size_t l_min = 2;
  bool include_loi = true;
  std::size_t min_points = 10;
  bool order_preserving = false;
  std::size_t workers = 1;
  bool keep_member_det = false;

  void validate() const;
};

struct FrameResult {
  double frame = 0.0;
  double e_tacts = 0.0;
  double e_interp = 0.0;
  std::vector<double> e_members;  // per omega; NaN where undefined
  std::vector<double> rec_times;
  std::vector<double> truth_exponent;
  std::vector<Regime> truth;
  std::vector<double> sdet;
  std::vector<Regime> tacts_labels;
  std::vector<double> interp_det;
  std::vector<Regime> interp_labels;
  std::vector<std::vector<double>> member_det;  // when keep_member_det
};

struct CellResult {
  DistortionCell cell;
  std::uint64_t seed = 0;
  std::size_t points = 0;
  std::vector<double> omegas;
  std::vector<double> lambdas;
  std::vector<FrameResult> frames;
  std::optional<std::string> error;
};

struct BenchmarkReport {
  std::vector<double> frames;
  std::vector<CellResult> cells;
  double x0 = 0.0;

  /// Mean error over successful cells for one frame index; NaN if none.
  double mean_error(std::size_t frame_index, bool tacts) const;
  /// Mean over all successful (cell, frame) pairs.
  double overall_mean_error(bool tacts) const;
};

BenchmarkReport run_benchmark(const BenchConfig& config);

}  // namespace tacts
