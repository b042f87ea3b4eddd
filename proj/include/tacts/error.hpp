#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tacts {

enum class Errc {
  invalid_input,
  gap,
  all_gaps,
  degenerate_amplitude,
  segment_too_small,
  degenerate_distribution,
  size_limit,
  optimization_failed,
  empty_series,
  timeline_mismatch,
  extrapolation,
  parse_error,
  duplicate_time,
  config,
  numerical,
  io,
};

std::string_view to_string(Errc code) noexcept;

/// Broad failure class used for process exit codes: config 2, data 3, numerical 4.
enum class ErrorClass { config, data, numerical };

ErrorClass classify(Errc code) noexcept;
std::string_view to_string(ErrorClass cls) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tacts
