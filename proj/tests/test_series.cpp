#include <doctest.h>

#include <cmath>

#include "tacts/error.hpp"
#include "tacts/series.hpp"

using namespace tacts;

TEST_CASE("irregular series rejects malformed input") {
  CHECK_THROWS_AS(IrregularSeries({}, {}), Error);
  CHECK_THROWS_AS(IrregularSeries({0.0, 1.0}, {1.0}), Error);
  CHECK_THROWS_AS(IrregularSeries({0.0, 1.0}, {1.0, NAN}), Error);
  CHECK_THROWS_AS(IrregularSeries({1.0, 0.0}, {1.0, 2.0}), Error);
  try {
    IrregularSeries({0.0, 2.5, 2.5}, {1.0, 2.0, 3.0});
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::duplicate_time);
    CHECK(std::string(e.what()).find("2.5") != std::string::npos);
  }
}

TEST_CASE("regular timeline") {
  const RegularTimeline tl(10.0, 0.5, 5);
  CHECK(tl.front() == 10.0);
  CHECK(tl.back() == 12.0);
  CHECK(timeline_points(tl).size() == 5);
  CHECK_THROWS_AS(RegularTimeline(0.0, 0.0, 3), Error);
  CHECK_THROWS_AS(RegularTimeline(0.0, 1.0, 0), Error);
}

TEST_CASE("segments are half-open") {
  const IrregularSeries s({0.0, 1.0, 2.0, 3.0, 4.0}, {10, 11, 12, 13, 14});
  const Segment seg = extract_segment(s, 1.0, 2.0);
  REQUIRE(seg.size() == 2);
  CHECK(seg.rel_times[0] == 0.0);
  CHECK(seg.rel_times[1] == 1.0);
  CHECK(seg.amplitudes[1] == 12.0);
  CHECK(seg.origin == 1.0);
  CHECK(extract_segment(s, 4.5, 1.0).size() == 0);
  const IndexRange r = segment_range(s, -1.0, 1.0);
  CHECK(r.size() == 0);
}

TEST_CASE("relative times stay below the width under rounding") {
  // 0.3 - 0.1 rounds to 0.19999999999999998 < 0.2, but other combinations
  // can round up to the width; the clamp keeps every point inside.
  const IrregularSeries s({0.1, 0.30000000000000004}, {1.0, 2.0});
  const Segment seg = extract_segment(s, 0.1, 0.2 + 1e-17);
  for (double t : seg.rel_times) CHECK(t < 0.2 + 1e-17);
}

TEST_CASE("sampling stats use the population deviation") {
  const IrregularSeries s({0.0, 1.0, 3.0, 6.0}, {0, 0, 0, 0});
  const SamplingStats st = sampling_stats(s);
  CHECK(st.mean_dt == doctest::Approx(2.0));
  CHECK(st.std_dt == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(st.count == 4);
  CHECK_THROWS_AS(sampling_stats(IrregularSeries({0.0}, {1.0})), Error);
}
