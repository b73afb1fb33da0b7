#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "vhs/anthro.hpp"

namespace vhs {

struct LoadShare {
  std::string target;  // end effector or joint name
  double fraction = 1.0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // m, target frame
};

struct ScenarioLoad {
  std::string name;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N, world
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N m, world
  std::vector<LoadShare> sharing;                    // fractions sum to 1
};

struct Phase {
  std::string label;
  double duration_s = 0.0;
  double load_scale = 1.0;                   // multiplies external loads only
  std::map<std::string, double> posture_deg;  // overrides of the base posture
};

struct Calibration {
  double reference_fmvc = 0.0;  // load ratio at mean strength
  double tolerance = 0.05;      // relative, on the inverse-dynamics ratio
};

struct JointOfInterest {
  std::string label;             // "shoulder"
  std::string joint;             // chain joint, e.g. "r_shoulder_flexion"
  std::string strength_profile;  // unsided profile joint, e.g. "shoulder_flexion"
  std::string resistance_group;  // registry muscle group
  std::optional<double> cv;      // overrides the profile's population CV
  std::optional<Calibration> calibration;
};

struct PopulationSelectors {
  std::vector<double> strength_z{-2, -1, 0, 1, 2};
  std::vector<double> met_offsets{-1, 0, 1};        // rows m_bar + o * sigma_m
  std::vector<double> reduction_offsets{0, 1, 2};
  std::optional<double> reduction_time_s;           // defaults to the schedule length
};

struct OutputSettings {
  std::filesystem::path directory;
  double sample_interval_s = 30.0;
};

/// Parsed and validated scenario file. Angles in degrees, lengths in m,
/// forces in N, times in s.
struct ScenarioSpec {
  std::string name;
  std::string description;
  Anthropometry anthropometry;
  Eigen::Vector3d gravity{0.0, -9.81, 0.0};
  std::map<std::string, double> posture_deg;
  Eigen::Vector3d root_position = Eigen::Vector3d::Zero();
  std::vector<ScenarioLoad> loads;
  std::vector<Phase> phases;
  PopulationSelectors population;
  std::vector<JointOfInterest> joints;
  OutputSettings output;

  double total_duration_s() const;

  // Unknown keys, wrong types and violated invariants raise SchemaError.
  static ScenarioSpec parse(const nlohmann::json& doc, const std::string& origin = "scenario");
  static ScenarioSpec load(const std::filesystem::path& path);
};

}  // namespace vhs
