#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vhs/anthro.hpp"
#include "vhs/dynamics.hpp"
#include "vhs/fatigue.hpp"
#include "vhs/kinematics.hpp"
#include "vhs/scenario.hpp"
#include "vhs/strength.hpp"

namespace vhs {

/// Strength vector at one instant: label -> current exertable torque, N m.
struct HumanStatus {
  double timestamp_s = 0.0;
  std::map<std::string, double> strengths;
};

/// One column of the normalized-status table for a joint. Ratios are
/// relative to the capacity at the start of the work.
struct StatusDelta {
  double time_s = 0.0;
  double strength_nm = 0.0;
  double change_nm = 0.0;        // HS(t) - HS(previous sample)
  double normalized = 1.0;       // HS_i / HS_max
  double step_reduction = 0.0;   // (HS_{i-1} - HS_i) / HS_max, 0 for the first column
  double total_reduction = 0.0;  // (HS_max - HS_i) / HS_max = 1 - normalized
};

// Normalized measures from a capacity sequence HS_i in N m.
std::vector<StatusDelta> status_deltas(const std::vector<double>& times_s, const std::vector<double>& strengths_nm,
                                       double hs_max_nm);

struct TimeSample {
  double time_s = 0.0;
  std::string joint;  // label
  double f_cem_nm = 0.0;
  double normalized = 1.0;
  int phase_index = 0;  // phase during which the sample falls; boundaries belong to the ending phase
  bool sustained = true;
};

enum class CellState { ok, overloaded, nonphysical, undefined_row };
std::string to_string(CellState s);

struct GridCell {
  double value = 0.0;  // MET s, or reduction ratio
  CellState state = CellState::ok;
  bool not_sustained = false;  // reduction grids: exhausted before the evaluation time
  double f_mvc = 0.0;
};

struct PopulationGrid {
  std::vector<double> row_offsets;     // resistance = m_bar + offset * sigma_m
  std::vector<double> row_resistance;  // min
  std::vector<double> column_z;        // strength = S (1 + z cv)
  std::vector<std::vector<GridCell>> cells;
  double time_s = 0.0;  // reduction grids only
};

// MET over the population for a constant load ratio at mean strength.
PopulationGrid met_grid(double f_mean, double cv, const FatigueResistanceEntry& resistance,
                        const std::vector<double>& offsets, const std::vector<double>& z);

// (HS_max - HS(t)) / HS_max over the population for a schedule of load
// ratios at mean strength. Every cell carries a value; exhausted cells are
// flagged rather than blanked.
PopulationGrid reduction_grid(const std::vector<LoadStep>& schedule_mean, double cv,
                              const FatigueResistanceEntry& resistance, const std::vector<double>& offsets,
                              const std::vector<double>& z, double t_s);

struct JointReport {
  std::string label;
  std::string joint;
  std::string strength_profile;
  std::string resistance_group;
  double cv = 0.0;
  double moment_nm = 0.0;        // signed, about the joint axis, first phase
  double anatomical_moment_nm = 0.0;
  double mvc_mean_nm = 0.0;      // mean-strength capacity, first phase posture
  double mvc_nominal_nm = 0.0;   // at the scenario's strength percentile
  double fmvc_inverse_dynamics = 0.0;  // |moment| / mvc_mean
  double fmvc = 0.0;                   // ratio used for fatigue at the nominal percentile, first phase
  std::string fmvc_source;             // "inverse_dynamics" or "calibration"
  std::optional<double> calibration_residual;  // fmvc_inverse_dynamics / reference - 1
  FatigueResistanceEntry resistance;
  std::optional<double> met_s;         // first-phase constant load
  std::optional<double> exhaustion_s;  // over the schedule, last phase continued
  std::vector<double> phase_fmvc;      // nominal percentile
  std::vector<StatusDelta> status;     // at phase boundaries
  PopulationGrid met;
  PopulationGrid reduction;
};

struct EvaluationReport {
  std::string scenario;
  Anthropometry anthropometry;
  double duration_s = 0.0;
  std::vector<std::string> warnings;
  std::vector<JointLoad> loads;  // first phase
  std::vector<JointReport> joints;
  std::vector<TimeSample> series;
  std::vector<HumanStatus> status;
  std::optional<std::string> limiting_joint;
};

/// Model tables an evaluation draws on.
struct ModelData {
  AnthropometryTable anthropometry;
  ChainDefinition chain;
  StrengthLibrary strength;
  std::vector<FatigueResistanceEntry> resistance;

  static ModelData bundled();
  const FatigueResistanceEntry& find_resistance(const std::string& group) const;
};

// Errors: ConfigError for unresolved references, AnalysisError for a
// nominal overload (load ratio above 1) or an undefined resistance.
EvaluationReport evaluate_scenario(const ScenarioSpec& spec, const ModelData& data);
EvaluationReport evaluate_scenario(const ScenarioSpec& spec);

const JointReport& find_joint(const EvaluationReport& report, const std::string& label);

nlohmann::json to_json(const EvaluationReport& report);

// Writes report.json and the CSV tables into the directory, each file
// replaced atomically. Returns the written paths.
std::vector<std::filesystem::path> write_report(const EvaluationReport& report, const std::filesystem::path& directory);

}  // namespace vhs
