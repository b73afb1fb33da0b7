#include <doctest.h>

#include <cmath>
#include <random>

#include "vhs/error.hpp"
#include "vhs/expression.hpp"
#include "vhs/fatigue.hpp"

using namespace vhs;

TEST_CASE("decay reaches the load exactly at the endurance time") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> uf(0.01, 0.999), um(0.2, 3.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = FatigueParams::from_resistance(um(rng));
    const double f = uf(rng);
    worst = std::max(worst, std::abs(decay_constant_load(p, f, met(p, f)) - f));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("closed-form endurance time") {
  const auto p = FatigueParams::from_resistance(1.0);
  CHECK(met(p, 1.0) == 0.0);
  CHECK(met(p, 0.5) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(met(FatigueParams::from_resistance(0.7562), 0.3047) * 60.0 == doctest::Approx(176.94).epsilon(1e-3));
  CHECK_THROWS_AS(met(p, 0.0), DomainError);
  CHECK_THROWS_AS(met(p, 1.2), DomainError);
  CHECK_THROWS_AS(FatigueParams::from_resistance(0.0), DomainError);
}

TEST_CASE("exponential additivity") {
  const auto p = FatigueParams::from_resistance(0.8135);
  for (double f : {0.05, 0.3, 0.9}) {
    for (double t1 : {0.1, 1.0, 4.0}) {
      for (double t2 : {0.2, 2.5}) {
        CHECK(std::abs(decay_constant_load(p, f, t1 + t2) - decay_constant_load(p, f, t1) * decay_constant_load(p, f, t2)) <
              1e-12);
      }
    }
  }
}

TEST_CASE("endurance time is monotone in load and resistance") {
  for (double m = 0.2; m <= 3.0; m += 0.2) {
    const auto p = FatigueParams::from_resistance(m);
    const auto q = FatigueParams::from_resistance(m + 0.2);
    double prev = INFINITY;
    for (int i = 1; i <= 100; ++i) {
      const double f = i / 100.0;
      const double t = met(p, f);
      CHECK(t < prev);
      prev = t;
      if (f < 1.0) CHECK(met(q, f) > t);
    }
  }
}

TEST_CASE("numeric integration agrees with the closed form") {
  const auto p = FatigueParams::from_resistance(0.7562, 60.0);
  SUBCASE("constant load") {
    const auto samples = integrate_variable_load(p, [](double) { return 0.3047 * 60.0; }, 3.0);
    REQUIRE(samples.size() == 3001);
    for (const auto& s : samples) {
      const double exact = decay_constant_load(p, 0.3047, s.t_s / 60.0);
      CHECK(std::abs(s.normalized - exact) / exact < 1e-6);
    }
  }
  SUBCASE("time-varying load") {
    // L(t) = MVC (0.3 + 0.2 sin t) integrates to 0.3 t + 0.2 (1 - cos t).
    const auto samples = integrate_variable_load(p, [](double t) { return 60.0 * (0.3 + 0.2 * std::sin(t)); }, 5.0);
    for (const auto& s : samples) {
      const double t = s.t_s / 60.0;
      const double exact = std::exp(-(0.3 * t + 0.2 * (1.0 - std::cos(t))) / 0.7562);
      CHECK(std::abs(s.normalized - exact) / exact < 1e-6);
    }
  }
  CHECK_THROWS_AS(integrate_variable_load(p, [](double) { return -1.0; }, 1.0), DomainError);
}

TEST_CASE("inverse of the endurance time") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> uf(0.01, 0.999);
  const auto p = FatigueParams::from_resistance(0.7562);
  for (int i = 0; i < 200; ++i) {
    const double f = uf(rng);
    CHECK(solve_fmvc_from_met(p, met(p, f)) == doctest::Approx(f).epsilon(1e-12));
  }
  CHECK(solve_fmvc_from_met(p, 0.0) == 1.0);
  CHECK_THROWS_AS(solve_fmvc_from_met(p, -1.0), DomainError);
}

TEST_CASE("piecewise schedules") {
  const auto p = FatigueParams::from_resistance(1.0);
  const std::vector<LoadStep> steps{{0.2, 1.0}, {0.0, 0.5}, {0.4, 1.0}};
  CHECK(decay_piecewise(p, steps, 0.0) == 1.0);
  CHECK(decay_piecewise(p, steps, 1.2) == doctest::Approx(std::exp(-0.2)).epsilon(1e-15));
  CHECK(decay_piecewise(p, steps, 2.0) == doctest::Approx(std::exp(-0.2 - 0.2)).epsilon(1e-15));
  // Beyond the schedule the last step continues.
  CHECK(decay_piecewise(p, steps, 4.5) == doctest::Approx(std::exp(-0.2 - 0.4 * 3.0)).epsilon(1e-15));
  CHECK(decay_piecewise(p, {{0.3, 2.0}}, 1.3) == decay_constant_load(p, 0.3, 1.3));

  const auto te = exhaustion_time(p, steps);
  REQUIRE(te);
  CHECK(decay_piecewise(p, steps, *te) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(*exhaustion_time(p, {{0.5, 1.0}}) == doctest::Approx(met(p, 0.5)).epsilon(1e-15));
  CHECK_FALSE(exhaustion_time(p, {{0.0, 1.0}}));
  CHECK_THROWS_AS(decay_piecewise(p, {}, 1.0), DomainError);
}

TEST_CASE("regression recovers a known resistance") {
  const auto grid = regression_grid();
  REQUIRE(grid.size() == 84);
  CHECK(grid.front() == 0.16);
  CHECK(grid.back() == 0.99);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(std::abs(grid[i] - grid[i - 1] - 0.01) < 1e-12);
  for (double c : {0.5, 1.0, 2.5}) {
    const auto model = METModel::make("scaled", std::to_string(c) + " * (-ln(x)/x)");
    CHECK(std::abs(regress_fatigue_resistance(model) - c) < 1e-10);
  }
  const auto narrow = METModel::make("narrow", "-ln(x)/x", 0.2, 0.99);
  CHECK_THROWS_AS(regress_fatigue_resistance(narrow), DomainError);
  CHECK_THROWS_AS(METModel::make("broken", "-ln(x)/"), ExpressionParseError);
}

TEST_CASE("bundled fatigue resistance registry") {
  struct Row {
    const char* group;
    double m, s;
  };
  for (const Row r : {Row{"general", 0.8135, 0.2320}, Row{"shoulder", 0.7562, 0.4347}, Row{"elbow", 0.8609, 0.4079},
                      Row{"hip_back", 1.9701, 1.1476}}) {
    const auto& e = find_resistance(r.group);
    CHECK(e.m_bar == r.m);
    CHECK(e.sigma_m == r.s);
  }
  CHECK_THROWS_AS(find_resistance("neck"), ConfigError);
}

TEST_CASE("group statistics") {
  const auto pop = group_statistics({1.0, 3.0});
  CHECK(pop.mean == 2.0);
  CHECK(pop.sigma == 1.0);
  CHECK(group_statistics({1.0, 3.0}, true).sigma == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(group_statistics({}), DomainError);
}
