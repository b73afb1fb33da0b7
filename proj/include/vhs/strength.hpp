#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vhs/anthro.hpp"

namespace vhs {

struct StrengthVariable {
  std::string name;   // symbol used by the terms, e.g. "alpha_e"
  std::string joint;  // unsided anatomical joint, e.g. "elbow_flexion"
  double min_deg = 0.0;
  double max_deg = 0.0;
};

struct StrengthTerm {
  double coef = 0.0;
  std::map<std::string, int> powers;  // variable name -> exponent
};

/// Posture-dependent joint moment capacity: scale * sum(coef * prod(angle^power)),
/// angles in degrees, result in N m.
struct StrengthProfile {
  std::string joint;
  Gender gender = Gender::male;
  std::vector<StrengthVariable> variables;
  double scale = 1.0;
  std::vector<StrengthTerm> terms;
  double cv = 0.0;  // population coefficient of variation
  std::map<std::string, std::string> provenance;
};

class StrengthLibrary {
 public:
  static StrengthLibrary load(const std::filesystem::path& path);
  static StrengthLibrary bundled();

  const std::vector<StrengthProfile>& profiles() const noexcept { return profiles_; }
  // Throws ConfigError when no profile exists for the joint and gender.
  const StrengthProfile& find(const std::string& joint, Gender gender) const;

 private:
  std::vector<StrengthProfile> profiles_;
};

// Angles are keyed by variable name or by the variable's joint name. Angles
// outside the declared domain raise DomainError naming the angle.
double joint_strength(const StrengthProfile& profile, const std::map<std::string, double>& angles_deg);

struct PopulationSpread {
  double mean = 0.0;   // N m
  double sigma = 0.0;  // N m

  static PopulationSpread from_cv(double mean, double cv);
};

// S + z sigma; nonpositive results raise DomainError.
double percentile_strength(const PopulationSpread& spread, double z);

// Standard normal quantile for a percentile in (0, 100).
double percentile_to_z(double percentile);

}  // namespace vhs
