#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "vhs/anthro.hpp"
#include "vhs/kinematics.hpp"

namespace vhs {

// World frame: +Y up, so standing posture loads the legs axially.
inline const Eigen::Vector3d kDefaultGravity{0.0, -9.81, 0.0};

/// Force and torque acting on the body at a named point. The target is an
/// end effector or a joint frame; the offset is expressed in that frame.
/// Force and torque are world-frame vectors.
struct ExternalLoad {
  std::string target;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d force = Eigen::Vector3d::Zero();   // N
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();  // N m
};

/// Load carried by a joint: the signed moment about its axis plus the full
/// force and moment the antecedent exerts on the subtree (world frame,
/// moment about the joint origin).
struct JointLoad {
  int joint = 0;
  std::string name;
  double moment = 0.0;
  Eigen::Vector3d reaction_force = Eigen::Vector3d::Zero();
  Eigen::Vector3d reaction_moment = Eigen::Vector3d::Zero();
};

// Rigid body carried by one chain frame; all quantities in frame coordinates.
struct LinkInertia {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();  // about the COM
  std::vector<std::string> segments;
};

/// Segment masses mounted on the chain. Every segment must have an
/// attachment and every attachment a segment.
class BodyModel {
 public:
  BodyModel() = default;
  BodyModel(const ChainModel& chain, const std::vector<SegmentDynamics>& segments);
  // Direct construction; links[0] is the base and carries no mass.
  explicit BodyModel(std::vector<LinkInertia> links);

  const std::vector<LinkInertia>& links() const noexcept { return links_; }
  double total_mass() const noexcept;
  BodyModel scaled(double mass_factor) const;

 private:
  std::vector<LinkInertia> links_;
};

std::vector<JointLoad> inverse_dynamics_static(const ChainModel& chain, const BodyModel& body,
                                               const PostureState& posture, const std::vector<ExternalLoad>& loads,
                                               const Eigen::Vector3d& gravity = kDefaultGravity);

// Full recursion with velocity and acceleration terms. Empty q_dot or
// q_ddot count as zero.
std::vector<JointLoad> general_inverse_dynamics(const ChainModel& chain, const BodyModel& body,
                                                const PostureState& posture, const std::vector<ExternalLoad>& loads,
                                                const Eigen::Vector3d& gravity = kDefaultGravity);

// World position of the whole-body centre of mass.
Eigen::Vector3d center_of_mass(const ChainModel& chain, const BodyModel& body, const PostureState& posture);

}  // namespace vhs
