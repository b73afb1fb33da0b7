#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "vhs/anthro.hpp"

namespace vhs {

/// One revolute joint in modified DH form. The frame of joint j is placed
/// relative to its antecedent a(j) by
///   Rz(gamma) Tz(b) Rx(alpha) Tx(d) Rz(q) Tz(r).
struct DHRow {
  int j = 0;
  int antecedent = 0;  // a(j); 0 is the base frame
  int u = 0;           // 1 where the row opens a new branch
  int sigma = 0;       // 0 = revolute (all rows of the body chain)
  double gamma = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double d = 0.0;
  double r = 0.0;
  double q_ini = 0.0;
  std::string name;
  int anatomical_sign = 1;  // anatomical angle = sign * (q - q_ini)
};

struct JointAxis {
  std::string name;
  double q_lower = 0.0;  // absolute joint coordinate, rad
  double q_upper = 0.0;
};

struct EndEffector {
  std::string name;
  int frame = 0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();  // in frame coordinates
};

// Where a body segment rides on the chain.
struct SegmentAttachment {
  std::string segment;
  int frame = 0;
  Eigen::Vector3d proximal = Eigen::Vector3d::Zero();  // frame coordinates
  int axis_index = 2;                                  // 0,1,2 = x,y,z
  double axis_sign = 1.0;
  bool lumped = false;  // mass concentrated at the proximal point
  Eigen::Vector3d axis() const { return axis_sign * Eigen::Vector3d::Unit(axis_index); }
};

/// Unresolved chain description: DH entries as expressions over the
/// anthropometric symbols. Mirrors data/chain.json.
struct ChainDefinition {
  struct Row {
    int j = 0;
    int antecedent = 0;
    int u = 0;
    int sigma = 0;
    std::string gamma, b, alpha, d, r, q_ini;
    std::string name;
    int anatomical_sign = 1;
    double limit_lower_deg = -180.0;
    double limit_upper_deg = 180.0;
  };
  struct Effector {
    std::string name;
    int frame = 0;
    std::array<std::string, 3> offset;
  };
  struct Attachment {
    std::string segment;
    int frame = 0;
    std::array<std::string, 3> proximal;
    std::string axis;
    bool lumped = false;
  };

  std::vector<Row> rows;
  std::vector<Effector> effectors;
  std::vector<Attachment> attachments;

  static ChainDefinition load(const std::filesystem::path& path);
  static ChainDefinition bundled();
};

class ChainModel {
 public:
  ChainModel() = default;
  // Generic tree; rows must be numbered 1..n with a(j) < j.
  ChainModel(std::vector<DHRow> rows, std::vector<JointAxis> limits, std::vector<EndEffector> effectors = {},
             std::vector<SegmentAttachment> attachments = {}, std::vector<SegmentGeometry> geometry = {});

  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<DHRow>& rows() const noexcept { return rows_; }
  const DHRow& row(int j) const { return rows_.at(static_cast<std::size_t>(j - 1)); }
  const std::vector<JointAxis>& limits() const noexcept { return limits_; }
  const std::vector<EndEffector>& effectors() const noexcept { return effectors_; }
  const std::vector<SegmentAttachment>& attachments() const noexcept { return attachments_; }
  const std::vector<SegmentGeometry>& geometry() const noexcept { return geometry_; }
  const std::vector<std::vector<int>>& children() const noexcept { return children_; }

  // Joint index j (1-based) for a joint name; nullopt when unknown.
  std::optional<int> joint_index(std::string_view name) const;
  const EndEffector* effector(std::string_view name) const;

  Eigen::VectorXd initial_q() const;

  void set_limits(std::vector<JointAxis> limits);

 private:
  std::vector<DHRow> rows_;
  std::vector<JointAxis> limits_;
  std::vector<EndEffector> effectors_;
  std::vector<SegmentAttachment> attachments_;
  std::vector<SegmentGeometry> geometry_;
  std::vector<std::vector<int>> children_;  // index 0 = base
};

// Resolves the bundled definition against scaled segment lengths. Missing
// symbols raise ConfigError naming the symbol.
ChainModel build_chain(const std::vector<SegmentGeometry>& geometry);
ChainModel build_chain(const ChainDefinition& definition, const std::vector<SegmentGeometry>& geometry);

struct PostureState {
  Eigen::VectorXd q;
  Eigen::VectorXd q_dot;
  Eigen::VectorXd q_ddot;
  Eigen::Vector3d root_position = Eigen::Vector3d::Zero();

  static PostureState initial(const ChainModel& chain);
  // Named anatomical angles in degrees, measured from q_ini with the joint's sign.
  static PostureState from_anatomical(const ChainModel& chain, const std::map<std::string, double>& angles_deg,
                                      const Eigen::Vector3d& root = Eigen::Vector3d::Zero());
};

double anatomical_angle_deg(const ChainModel& chain, const PostureState& posture, int j);

struct FramePose {
  int frame = 0;  // 0 = base
  std::string name;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis() const { return rotation.col(2); }
};

struct KinematicState {
  std::vector<FramePose> frames;     // index = frame number, 0..n
  std::vector<FramePose> effectors;  // same order as ChainModel::effectors()

  const FramePose& effector(std::string_view name) const;
};

KinematicState forward_kinematics(const ChainModel& chain, const PostureState& posture);

// World position of a named target: an end effector or a joint frame origin.
Eigen::Vector3d point_position(const ChainModel& chain, const KinematicState& state, std::string_view target,
                               const Eigen::Vector3d& local_offset = Eigen::Vector3d::Zero());

struct LimitViolation {
  int joint = 0;
  std::string name;
  double q = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double overshoot = 0.0;  // rad beyond the violated bound, positive
};

std::vector<LimitViolation> check_limits(const ChainModel& chain, const PostureState& posture);

// Single modified-DH step, exposed for tests and the chain dump.
Eigen::Isometry3d dh_transform(const DHRow& row, double q);

}  // namespace vhs
