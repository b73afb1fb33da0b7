#include <doctest.h>

#include <map>

#include "vhs/anthro.hpp"
#include "vhs/error.hpp"

using namespace vhs;

TEST_CASE("segment lengths scale with stature") {
  Anthropometry a;
  a.stature_m = 1.75;
  const auto geometry = scale_segments(AnthropometryTable::bundled(), a);
  std::map<std::string, double> len;
  for (const auto& g : geometry) len[g.symbol] = g.length_m;
  // Proportions of stature from the body-segment table.
  CHECK(len.at("R_ua") == doctest::Approx(0.186 * 1.75).epsilon(1e-12));
  CHECK(len.at("R_la") == doctest::Approx(0.146 * 1.75).epsilon(1e-12));
  CHECK(len.at("R_h") == doctest::Approx(0.108 * 1.75).epsilon(1e-12));
  CHECK(len.at("R_ul") == doctest::Approx(0.245 * 1.75).epsilon(1e-12));
  CHECK(len.at("D_ll") == doctest::Approx(0.246 * 1.75).epsilon(1e-12));
  CHECK(len.at("W_s") == doctest::Approx(0.204 * 1.75).epsilon(1e-12));
  CHECK(len.at("W_w") == doctest::Approx(0.100 * 1.75).epsilon(1e-12));
  CHECK(len.at("D_ub") == doctest::Approx(0.198 * 1.75).epsilon(1e-12));
  CHECK(len.at("R_ub") == doctest::Approx(0.090 * 1.75).epsilon(1e-12));

  const auto symbols = length_symbols(geometry);
  CHECK(symbols.at("L_ub") == symbols.at("D_ub"));
  CHECK(symbols.at("R_lb") == symbols.at("D_ub"));
}

TEST_CASE("segment masses conserve body weight") {
  for (double w : {50.0, 75.0, 112.5}) {
    Anthropometry a;
    a.body_weight_kg = w;
    double total = 0.0;
    for (const auto& s : distribute_masses(AnthropometryTable::bundled(), a)) {
      CHECK(s.mass_kg > 0.0);
      total += s.mass_kg;
    }
    CHECK(std::abs(total - w) / w < 1e-9);
  }
}

TEST_CASE("bilateral segments are duplicated per side") {
  const auto segs = distribute_masses(AnthropometryTable::bundled(), Anthropometry{});
  std::map<std::string, double> m;
  for (const auto& s : segs) m[s.name] = s.mass_kg;
  CHECK(m.count("l_upper_arm") == 1);
  CHECK(m.count("r_upper_arm") == 1);
  CHECK(m.at("l_thigh") == m.at("r_thigh"));
  // Upper arm: 54.9 % of a 5.1 % arm.
  CHECK(m.at("r_upper_arm") == doctest::Approx(75.0 * 0.051 * 0.549).epsilon(1e-12));
}

TEST_CASE("uniform-solid inertias") {
  const auto c = cylinder_inertia(2.0, 0.3, 0.05);
  CHECK(c[0] == doctest::Approx(2.0 * (3 * 0.05 * 0.05 + 0.09) / 12));
  CHECK(c[2] == doctest::Approx(0.5 * 2.0 * 0.05 * 0.05));
  const auto b = ball_inertia(5.0, 0.1);
  CHECK(b[0] == doctest::Approx(0.4 * 5.0 * 0.01));
  const auto q = cuboid_inertia(12.0, 1.0, 2.0, 3.0);
  CHECK(q[0] == doctest::Approx(4.0 + 9.0));
  CHECK(q[1] == doctest::Approx(1.0 + 9.0));
  CHECK(q[2] == doctest::Approx(1.0 + 4.0));
}

TEST_CASE("invalid anthropometry is rejected") {
  Anthropometry a;
  a.stature_m = 0.0;
  CHECK_THROWS_AS(a.validate(), DomainError);
  a = {};
  a.body_weight_kg = -1.0;
  CHECK_THROWS_AS(a.validate(), DomainError);
  a = {};
  a.strength_percentile = 100.0;
  CHECK_THROWS_AS(a.validate(), DomainError);
  CHECK_THROWS_AS(parse_gender("other"), DomainError);
}
