#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacts/series.hpp"

namespace tacts {

struct LoadedSeries {
  IrregularSeries series;
  std::vector<std::string> warnings;
};

/// Two-column (time, value) text. Fields may be separated by commas,
/// semicolons, tabs or spaces; lines starting with '#' are comments and a
/// single non-numeric first row is taken as a header. Rows are sorted by time.
LoadedSeries load_series(const std::filesystem::path& path);
LoadedSeries parse_series(std::istream& in, std::string_view source = "<stream>");

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_number(double v);

/// Column-oriented CSV builder. Every column has the same length.
class CsvTable {
 public:
  void add_column(std::string name, std::vector<std::string> cells);
  void add_column(std::string name, std::span<const double> values);
  std::string render() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<std::string>> cells_;
};

/// Writes via a temporary file and rename so readers never see half a file.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tacts
