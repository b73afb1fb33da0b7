#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vhs/expression.hpp"

namespace vhs {

/// Fatigue model parameters. Times are in minutes; k = 1/m.
struct FatigueParams {
  double mvc = 1.0;         // N m
  double resistance = 1.0;  // m, min

  static FatigueParams from_resistance(double m, double mvc = 1.0);
  double k() const noexcept { return 1.0 / resistance; }
  void validate() const;
};

// F_cem / MVC after t minutes at constant load ratio f.
double decay_constant_load(const FatigueParams& params, double f_mvc, double t_min);

struct FatigueSample {
  double t_s = 0.0;
  double f_cem = 0.0;  // N m
  double normalized = 1.0;
};

// Fixed-step RK4 on dF/dt = -k F L(t) / MVC. The load is a function of time
// in minutes returning N m; samples are emitted every step, in seconds.
std::vector<FatigueSample> integrate_variable_load(const FatigueParams& params,
                                                   const std::function<double(double)>& load_nm, double t_end_min,
                                                   double dt_min = 1e-3);

// Maximum endurance time in minutes; 0 at f = 1.
double met(const FatigueParams& params, double f_mvc);

// Inverse of met on (0, 1]; met is strictly decreasing there.
double solve_fmvc_from_met(const FatigueParams& params, double met_min);

struct LoadStep {
  double f_mvc = 0.0;  // load ratio, >= 0
  double duration_min = 0.0;
};

// Closed form over piecewise-constant steps: exp(-k * sum f_i dt_i). Times
// past the schedule continue the last step.
double decay_piecewise(const FatigueParams& params, const std::vector<LoadStep>& steps, double t_min);

// First time F_cem falls to the current load, continuing the last step
// indefinitely; nullopt when never reached.
std::optional<double> exhaustion_time(const FatigueParams& params, const std::vector<LoadStep>& steps);

/// Empirical endurance model f(x), x = f_MVC, returning minutes.
struct METModel {
  std::string name;
  Expression formula;
  double domain_lo = 0.0;
  double domain_hi = 1.0;
  std::string subjects;

  static METModel make(std::string name, std::string_view expression, double lo = 0.16, double hi = 0.99,
                       std::string subjects = {});
  // Parse errors propagate as ExpressionParseError; structure errors as SchemaError.
  static std::vector<METModel> load(const std::filesystem::path& path);
};

// x_i = (16 + i) / 100, i = 0..83.
std::vector<double> regression_grid();

// Least-squares slope through the origin of f against -ln(x)/x over the grid.
double regress_fatigue_resistance(const METModel& model);

struct FatigueResistanceEntry {
  std::string muscle_group;  // general, shoulder, elbow, hip_back
  double m_bar = 0.0;
  double sigma_m = 0.0;
  int models = 0;
};

std::vector<FatigueResistanceEntry> load_resistance_registry(const std::filesystem::path& path);
// Bundled table; loaded once.
const std::vector<FatigueResistanceEntry>& resistance_registry();
const FatigueResistanceEntry& find_resistance(const std::string& muscle_group);

struct GroupStatistics {
  double mean = 0.0;
  double sigma = 0.0;
};

// Population (n) or sample (n - 1) standard deviation.
GroupStatistics group_statistics(const std::vector<double>& values, bool sample_sigma = false);

}  // namespace vhs
