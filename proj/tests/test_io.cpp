#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tacts/error.hpp"
#include "tacts/io.hpp"

using namespace tacts;

namespace {

LoadedSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_series(in, "input");
}

Errc code_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::numerical;
}

}  // namespace

TEST_CASE("parse two-column text") {
  const auto a = parse("0,1.5\n2,2.5\n");
  CHECK(a.series.size() == 2);
  CHECK(a.series.values()[1] == 2.5);
  CHECK(a.warnings.empty());

  const auto b = parse("# comment\n\ntime\tvalue\n1\t2\n  3   4  \n5;6\n");
  CHECK(b.series.size() == 3);
  CHECK(b.series.times()[2] == 5.0);
  CHECK(b.warnings.size() == 1);  // header row
}

TEST_CASE("unsorted rows are sorted with a warning") {
  const auto s = parse("3,30\n1,10\n2,20\n");
  CHECK(s.series.times()[0] == 1.0);
  CHECK(s.series.values()[2] == 30.0);
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.warnings[0].find("sorted") != std::string::npos);
}

TEST_CASE("malformed input is reported") {
  CHECK(code_of("1,2\n1,3\n") == Errc::duplicate_time);
  CHECK_THROWS_WITH(parse("4,2\n4.25,3\n4.25,1\n"), doctest::Contains("4.25"));
  CHECK(code_of("1,2\n2,x\n") == Errc::parse_error);
  CHECK_THROWS_WITH(parse("1,2\n2,3\n3,4,5\n"), doctest::Contains("input:3:"));
  CHECK(code_of("1,2\n2,nan\n") == Errc::parse_error);
  CHECK(code_of("1,inf\n") == Errc::parse_error);
  CHECK(code_of("# only comments\n") == Errc::empty_series);
  CHECK_THROWS_AS(load_series("/nonexistent/file.csv"), Error);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(2.0) == "2");
}

TEST_CASE("csv tables and atomic writes") {
  CsvTable t;
  const std::vector<double> a{1.0, 2.5};
  t.add_column("a", a);
  t.add_column("b", std::vector<std::string>{"x", "y"});
  CHECK(t.render() == "a,b\n1,x\n2.5,y\n");
  CHECK_THROWS_AS(t.add_column("c", std::vector<double>{1.0}), Error);

  const auto dir = std::filesystem::temp_directory_path() / "tacts_io_test";
  std::filesystem::create_directories(dir);
  write_file(dir / "t.csv", t.render());
  std::ifstream in(dir / "t.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == t.render());
  CHECK(!std::filesystem::exists(dir / "t.csv.tmp"));
  std::filesystem::remove_all(dir);
}
