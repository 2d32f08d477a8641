#include <doctest.h>

#include <sstream>

#include "ssr/io.hpp"
#include "test_support.hpp"

using namespace ssr;

TEST_CASE("measure JSON round trip") {
  AtomicMeasure mu = test::table1();
  REQUIRE(mu.size() == 6);
  CHECK(mu.atoms[0].point.inclination() == doctest::Approx(1.366427));
  CHECK(mu.atoms[0].point.azimuth() == doctest::Approx(0.412278));
  AtomicMeasure back = measure_from_json(measure_to_json(mu));
  REQUIRE(back.size() == mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    CHECK((back.atoms[i].point.xyz() - mu.atoms[i].point.xyz()).norm() < 1e-14);
    CHECK(back.atoms[i].weight == mu.atoms[i].weight);
  }
}

TEST_CASE("moment JSON round trip") {
  MomentVector y = moments(4, test::table1());
  MomentVector back = moments_from_json(moments_to_json(y));
  CHECK(back.N == 4);
  CHECK(back.values == y.values);
}

TEST_CASE("malformed inputs") {
  CHECK_THROWS_AS(measure_from_json("{"), InputError);
  CHECK_THROWS_AS(measure_from_json("{\"atoms\": 3}"), InputError);
  CHECK_THROWS_AS(measure_from_json("{\"atoms\": [{\"r\": 1}]}"), InputError);
  CHECK_THROWS_AS(moments_from_json("{\"N\": 1, \"values\": [[1, 0]]}"), InputError);
  CHECK_THROWS_AS(moments_from_json("{\"N\": 0, \"values\": [[1]]}"), InputError);
  CHECK_THROWS_AS(load_measure("/nonexistent/measure.json"), InputError);
}

TEST_CASE("CSV round trip with quoting") {
  CsvTable rows = {{"a,b", "plain", "say \"hi\""}, {"1", "2", "3"}};
  std::ostringstream os;
  write_csv(os, {"x", "y", "z"}, rows);
  std::istringstream is(os.str());
  CsvTable back = read_csv(is);
  REQUIRE(back.size() == 3);
  CHECK(back[0] == std::vector<std::string>{"x", "y", "z"});
  CHECK(back[1] == rows[0]);
  CHECK(back[2] == rows[1]);
}

TEST_CASE("full precision doubles") {
  double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("sweep table shape") {
  std::vector<SweepBin> bins = {{0.1, 0.05, 0.15, 5, 1}, {0.2, 0.15, 0.25, 5, 4}};
  CsvTable t = sweep_table(bins);
  REQUIRE(t.size() == 2);
  CHECK(t[0].size() == kSweepHeader.size());
  CHECK(std::stod(t[1][5]) == doctest::Approx(0.8));
}
