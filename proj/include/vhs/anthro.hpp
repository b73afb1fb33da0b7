#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vhs {

enum class Gender { male, female };

Gender parse_gender(const std::string& text);
std::string to_string(Gender g);

struct Anthropometry {
  double stature_m = 1.75;
  double body_weight_kg = 75.0;
  Gender gender = Gender::male;
  double strength_percentile = 50.0;

  // Throws DomainError for nonpositive stature/weight or a percentile outside (0,100).
  void validate() const;
};

struct SegmentGeometry {
  std::string symbol;  // e.g. "R_ua"
  std::string name;    // e.g. "upper arm"
  double proportion_of_stature = 0.0;
  double length_m = 0.0;
  bool supplementary = false;  // modeling assumption outside the proportion table
  std::vector<std::string> aliases;
};

enum class SegmentShape { cylinder, ball, cube };

struct SegmentDynamics {
  std::string name;    // sided for bilateral segments: "l_upper_arm"
  std::string group;   // "arm", "torso", ...
  double mass_kg = 0.0;
  double length_m = 0.0;
  double com_offset_m = 0.0;  // from the proximal end along the segment axis
  // Principal moments about the COM: (transverse, transverse, axial) for
  // cylinders, (width, depth, axial) for cubes, equal values for balls.
  Eigen::Vector3d inertia_about_com = Eigen::Vector3d::Zero();
  SegmentShape shape = SegmentShape::cylinder;
};

struct MassSegmentSpec {
  std::string name;
  double percent_of_group = 0.0;
  SegmentShape shape = SegmentShape::cylinder;
  std::string length_symbol;
  std::string width_symbol;  // cubes only
};

struct MassGroupSpec {
  std::string group;
  double percent_of_body = 0.0;
  int count = 1;  // 2 for bilateral groups
  std::vector<MassSegmentSpec> segments;
};

struct LengthSpec {
  std::string symbol;
  std::string name;
  double proportion = 0.0;
  std::vector<std::string> aliases;
  bool supplementary = false;
};

/// Proportion and weight-distribution tables, normally read from
/// data/anthropometry.json.
struct AnthropometryTable {
  std::vector<LengthSpec> lengths;
  std::vector<MassGroupSpec> groups;
  double cylinder_radius_ratio = 0.15;
  double cube_depth_ratio = 0.6;

  static AnthropometryTable load(const std::filesystem::path& path);
  static AnthropometryTable bundled();
};

std::vector<SegmentGeometry> scale_segments(const AnthropometryTable& table, const Anthropometry& anthro);
std::vector<SegmentDynamics> distribute_masses(const AnthropometryTable& table, const Anthropometry& anthro);

// Symbol -> length map including aliases (R_lb, L_ub resolve to D_ub).
std::map<std::string, double, std::less<>> length_symbols(const std::vector<SegmentGeometry>& geometry);

// Uniform-density principal inertias.
Eigen::Vector3d cylinder_inertia(double mass, double length, double radius);
Eigen::Vector3d ball_inertia(double mass, double radius);
Eigen::Vector3d cuboid_inertia(double mass, double width, double depth, double length);

}  // namespace vhs
