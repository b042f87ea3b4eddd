#include "tacts/error.hpp"

namespace tacts {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid_input";
    case Errc::gap: return "gap";
    case Errc::all_gaps: return "all_gaps";
    case Errc::degenerate_amplitude: return "degenerate_amplitude";
    case Errc::segment_too_small: return "segment_too_small";
    case Errc::degenerate_distribution: return "degenerate_distribution";
    case Errc::size_limit: return "size_limit";
    case Errc::optimization_failed: return "optimization_failed";
    case Errc::empty_series: return "empty_series";
    case Errc::timeline_mismatch: return "timeline_mismatch";
    case Errc::extrapolation: return "extrapolation";
    case Errc::parse_error: return "parse_error";
    case Errc::duplicate_time: return "duplicate_time";
    case Errc::config: return "config";
    case Errc::numerical: return "numerical";
    case Errc::io: return "io";
  }
  return "unknown";
}

ErrorClass classify(Errc code) noexcept {
  switch (code) {
    case Errc::config:
    case Errc::timeline_mismatch:
      return ErrorClass::config;
    case Errc::invalid_input:
    case Errc::parse_error:
    case Errc::duplicate_time:
    case Errc::io:
    case Errc::extrapolation:
    case Errc::gap:
    case Errc::all_gaps:
    case Errc::segment_too_small:
    case Errc::empty_series:
      return ErrorClass::data;
    default:
      return ErrorClass::numerical;
  }
}

std::string_view to_string(ErrorClass cls) noexcept {
  switch (cls) {
    case ErrorClass::config: return "config";
    case ErrorClass::data: return "data";
    case ErrorClass::numerical: break;
  }
  return "numerical";
}

}  // namespace tacts
