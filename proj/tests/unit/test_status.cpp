#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vhs/error.hpp"
#include "vhs/status.hpp"

using namespace vhs;

namespace {

ScenarioSpec bundled(const char* name) {
  return ScenarioSpec::load(std::string(VHS_SOURCE_DIR) + "/scenarios/" + name + ".scenario");
}

const EvaluationReport& drilling() {
  static const EvaluationReport r = evaluate_scenario(bundled("drilling"));
  return r;
}

}  // namespace

TEST_CASE("status deltas") {
  const auto d = status_deltas({0, 30, 60}, {100, 80, 70}, 100);
  REQUIRE(d.size() == 3);
  CHECK(d[0].step_reduction == 0.0);
  CHECK(d[1].change_nm == -20.0);
  CHECK(d[1].step_reduction == doctest::Approx(0.2));
  CHECK(d[2].normalized == doctest::Approx(0.7));
  CHECK(d[2].total_reduction == doctest::Approx(0.3));
  CHECK_THROWS_AS(status_deltas({0}, {1, 2}, 1), DomainError);
}

TEST_CASE("unloaded work leaves the status unchanged") {
  const auto r = evaluate_scenario(bundled("unloaded"));
  CHECK_FALSE(r.limiting_joint);
  for (const auto& j : r.joints) {
    CHECK(j.moment_nm == 0.0);
    for (const auto& d : j.status) CHECK(d.normalized == 1.0);
  }
  for (const auto& s : r.series) CHECK(s.normalized == 1.0);
}

TEST_CASE("drilling status table") {
  const auto& r = drilling();
  REQUIRE(r.limiting_joint);
  CHECK(*r.limiting_joint == "shoulder");
  const auto& s = find_joint(r, "shoulder");
  CHECK(s.fmvc_source == "calibration");
  CHECK(s.fmvc == doctest::Approx(0.3047).epsilon(1e-12));
  REQUIRE(s.status.size() == 7);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < s.status.size(); ++i) {
    const auto& d = s.status[i];
    cumulative += d.step_reduction;
    CHECK(d.total_reduction == doctest::Approx(1.0 - d.normalized).epsilon(1e-15));
    CHECK(cumulative == doctest::Approx(d.total_reduction).epsilon(1e-12));
    if (i > 0) CHECK(d.normalized < s.status[i - 1].normalized);
  }
  CHECK(r.status.size() == 7);
  CHECK(r.status.back().strengths.at("shoulder") == doctest::Approx(s.status.back().strength_nm));
}

TEST_CASE("time series continues past exhaustion") {
  const auto& r = drilling();
  const auto& s = find_joint(r, "shoulder");
  REQUIRE(s.exhaustion_s);
  int flagged = 0;
  for (const auto& t : r.series) {
    if (t.joint != "shoulder") continue;
    CHECK(t.sustained == (t.time_s <= *s.exhaustion_s));
    flagged += t.sustained ? 0 : 1;
    if (t.time_s == 0.0) CHECK(t.phase_index == 0);
    if (t.time_s == 30.0) CHECK(t.phase_index == 0);
    if (t.time_s == 180.0) CHECK(t.phase_index == 5);
  }
  CHECK(flagged == 1);
}

TEST_CASE("grid cells agree with the fatigue kernel") {
  const auto& r = drilling();
  for (const auto& j : r.joints) {
    const double t_min = j.reduction.time_s / 60.0;
    for (std::size_t a = 0; a < j.reduction.cells.size(); ++a) {
      for (std::size_t b = 0; b < j.reduction.cells[a].size(); ++b) {
        const auto& c = j.reduction.cells[a][b];
        const auto p = FatigueParams::from_resistance(j.reduction.row_resistance[a]);
        CHECK(std::abs(decay_constant_load(p, c.f_mvc, t_min) - (1.0 - c.value)) < 1e-12);
        CHECK(c.not_sustained == (met(p, c.f_mvc) < t_min));
        if (b > 0) CHECK(c.value < j.reduction.cells[a][b - 1].value);
        if (a > 0) CHECK(c.value < j.reduction.cells[a - 1][b].value);
      }
    }
    for (std::size_t a = 0; a < j.met.cells.size(); ++a) {
      for (std::size_t b = 0; b < j.met.cells[a].size(); ++b) {
        const auto& c = j.met.cells[a][b];
        CHECK(c.state == CellState::ok);
        if (b > 0) CHECK(c.value > j.met.cells[a][b - 1].value);
        if (a > 0) CHECK(c.value > j.met.cells[a - 1][b].value);
      }
    }
  }
}

TEST_CASE("mean row at mean strength matches the status table") {
  const auto& s = find_joint(drilling(), "shoulder");
  // Offsets {0, 1, 2}, z {-2..2}: row 0, column 2 is (m_bar, S).
  CHECK(std::abs(s.reduction.cells[0][2].value - s.status.back().total_reduction) < 1e-9);
}

TEST_CASE("grid edge states") {
  const FatigueResistanceEntry e{"g", 0.5, 0.4, 1};
  const auto g = met_grid(0.9, 0.3, e, {-2, 0}, {-4, -1, 0});
  CHECK(g.cells[0][0].state == CellState::undefined_row);
  CHECK(g.cells[1][0].state == CellState::nonphysical);
  CHECK(g.cells[1][1].state == CellState::overloaded);
  CHECK(g.cells[1][1].value == 0.0);
  CHECK(g.cells[1][2].state == CellState::ok);
  CHECK(std::isinf(met_grid(0.0, 0.3, e, {0}, {0}).cells[0][0].value));
}

TEST_CASE("nominal overload is an analysis error") {
  auto spec = bundled("drilling_no_feed");
  spec.loads[0].force *= 20.0;
  CHECK_THROWS_AS(evaluate_scenario(spec), AnalysisError);
}

TEST_CASE("report files") {
  const auto dir = std::filesystem::temp_directory_path() / "vhs_status_report";
  std::filesystem::remove_all(dir);
  const auto files = write_report(drilling(), dir);
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "timeseries.csv"));
  CHECK(std::filesystem::exists(dir / "met_grid_shoulder.csv"));
  std::ifstream csv(dir / "timeseries.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "time_s,joint,F_cem_Nm,normalized_strength,phase_index,sustained");
  for (const auto& f : files) CHECK(f.extension() != ".tmp");
  const auto j = to_json(drilling());
  CHECK(j.at("limiting_joint") == "shoulder");
  std::filesystem::remove_all(dir);
}
