#include "tacts/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tacts/error.hpp"

namespace tacts {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) { return c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r'; };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i]) && line[i] != ',' && line[i] != ';') ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    out.push_back(line.substr(i, j - i));
    // Swallow trailing blanks plus at most one hard separator.
    while (j < line.size() && (line[j] == ' ' || line[j] == '\t' || line[j] == '\r')) ++j;
    if (j < line.size() && (line[j] == ',' || line[j] == ';')) ++j;
    i = j;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LoadedSeries parse_series(std::istream& in, std::string_view source) {
  std::vector<double> times, values;
  std::vector<std::string> warnings;
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body);
    double t = 0.0, x = 0.0;
    const bool numeric = fields.size() == 2 && parse_double(fields[0], t) && parse_double(fields[1], x);
    if (!numeric) {
      if (!seen_row) {
        seen_row = true;
        warnings.push_back(std::string(source) + ":" + std::to_string(line_no) +
                           ": treating non-numeric first row as a header");
        continue;
      }
      fail(Errc::parse_error, std::string(source) + ":" + std::to_string(line_no) +
                                  ": expected two numeric columns");
    }
    seen_row = true;
    if (!std::isfinite(t) || !std::isfinite(x)) {
      fail(Errc::parse_error,
           std::string(source) + ":" + std::to_string(line_no) + ": non-finite value");
    }
    times.push_back(t);
    values.push_back(x);
  }
  if (times.empty()) fail(Errc::empty_series, std::string(source) + ": no data rows");

  if (!std::is_sorted(times.begin(), times.end())) {
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    std::vector<double> ts(times.size()), xs(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      ts[i] = times[order[i]];
      xs[i] = values[order[i]];
    }
    times = std::move(ts);
    values = std::move(xs);
    warnings.push_back(std::string(source) + ": rows were not in time order and have been sorted");
  }
  return {IrregularSeries(std::move(times), std::move(values)), std::move(warnings)};
}

LoadedSeries load_series(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot open " + path.string());
  return parse_series(in, path.string());
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(Errc::numerical, "number formatting failed");
  return std::string(buf, ptr);
}

void CsvTable::add_column(std::string name, std::vector<std::string> cells) {
  if (!cells_.empty() && cells.size() != cells_.front().size()) {
    fail(Errc::invalid_input, "column " + name + " has a different length");
  }
  names_.push_back(std::move(name));
  cells_.push_back(std::move(cells));
}

void CsvTable::add_column(std::string name, std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_column(std::move(name), std::move(cells));
}

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (c) out += ',';
    out += names_[c];
  }
  out += '\n';
  const std::size_t rows = cells_.empty() ? 0 : cells_.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (c) out += ',';
      out += cells_[c][r];
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) fail(Errc::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "cannot rename " + tmp.string() + ": " + ec.message());
}

}  // namespace tacts
