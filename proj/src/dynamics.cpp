#include "vhs/dynamics.hpp"

#include <cmath>
#include <set>

#include "vhs/error.hpp"

namespace vhs {

namespace {

Eigen::Matrix3d parallel_axis(double mass, const Eigen::Vector3d& r) {
  return mass * (r.squaredNorm() * Eigen::Matrix3d::Identity() - r * r.transpose());
}

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

}  // namespace

BodyModel::BodyModel(const ChainModel& chain, const std::vector<SegmentDynamics>& segments) {
  links_.assign(chain.size() + 1, LinkInertia{});
  std::set<std::string> used;
  for (const auto& seg : segments) {
    const SegmentAttachment* att = nullptr;
    for (const auto& a : chain.attachments())
      if (a.segment == seg.name) att = &a;
    if (att == nullptr) throw ConfigError("segment '" + seg.name + "' has no attachment on the chain");
    if (att->frame == 0) throw ConfigError("segment '" + seg.name + "' cannot ride on the base frame");
    used.insert(seg.name);

    const Eigen::Vector3d axis = att->axis();
    const Eigen::Vector3d com = att->lumped ? att->proximal : Eigen::Vector3d(att->proximal + seg.com_offset_m * axis);
    // Principal moments: (width, depth, axial) mapped cyclically from the axis index.
    Eigen::Matrix3d inertia = Eigen::Matrix3d::Zero();
    const int k = att->axis_index;
    inertia((k + 1) % 3, (k + 1) % 3) = seg.inertia_about_com[0];
    inertia((k + 2) % 3, (k + 2) % 3) = seg.inertia_about_com[1];
    inertia(k, k) = seg.inertia_about_com[2];

    LinkInertia& link = links_[static_cast<std::size_t>(att->frame)];
    const double m = link.mass + seg.mass_kg;
    if (m <= 0.0) throw ConfigError("segment '" + seg.name + "' has nonpositive mass");
    const Eigen::Vector3d c = (link.mass * link.com + seg.mass_kg * com) / m;
    link.inertia = link.inertia + parallel_axis(link.mass, link.com - c) + inertia +
                   parallel_axis(seg.mass_kg, com - c);
    link.com = c;
    link.mass = m;
    link.segments.push_back(seg.name);
  }
  for (const auto& a : chain.attachments())
    if (!used.contains(a.segment)) throw ConfigError("attachment '" + a.segment + "' has no segment mass");
}

BodyModel::BodyModel(std::vector<LinkInertia> links) : links_(std::move(links)) {
  for (const auto& l : links_)
    if (!(std::isfinite(l.mass) && l.mass >= 0.0)) throw ConfigError("link mass must be finite and nonnegative");
}

double BodyModel::total_mass() const noexcept {
  double m = 0.0;
  for (const auto& l : links_) m += l.mass;
  return m;
}

BodyModel BodyModel::scaled(double mass_factor) const {
  std::vector<LinkInertia> links = links_;
  for (auto& l : links) {
    l.mass *= mass_factor;
    l.inertia *= mass_factor;
  }
  return BodyModel(std::move(links));
}

std::vector<JointLoad> inverse_dynamics_static(const ChainModel& chain, const BodyModel& body,
                                               const PostureState& posture, const std::vector<ExternalLoad>& loads,
                                               const Eigen::Vector3d& gravity) {
  PostureState still = posture;
  still.q_dot = Eigen::VectorXd::Zero(posture.q.size());
  still.q_ddot = Eigen::VectorXd::Zero(posture.q.size());
  return general_inverse_dynamics(chain, body, still, loads, gravity);
}

std::vector<JointLoad> general_inverse_dynamics(const ChainModel& chain, const BodyModel& body,
                                                const PostureState& posture, const std::vector<ExternalLoad>& loads,
                                                const Eigen::Vector3d& gravity) {
  const std::size_t n = chain.size();
  const auto nq = static_cast<Eigen::Index>(n);
  if (body.links().size() != n + 1) throw ConfigError("body model does not match the chain");
  if (!finite(gravity)) throw DomainError("gravity must be finite");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(nq);
  const Eigen::VectorXd& qd = posture.q_dot.size() == 0 ? zero : posture.q_dot;
  const Eigen::VectorXd& qdd = posture.q_ddot.size() == 0 ? zero : posture.q_ddot;
  if (qd.size() != nq || qdd.size() != nq) throw DomainError("joint rate vectors do not match the chain");
  if (!qd.allFinite() || !qdd.allFinite()) throw DomainError("joint rates must be finite");

  const KinematicState ks = forward_kinematics(chain, posture);

  // External loads reduced to (force, moment about frame origin) per frame.
  std::vector<Eigen::Vector3d> ext_f(n + 1, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> ext_n(n + 1, Eigen::Vector3d::Zero());
  for (const auto& load : loads) {
    if (!finite(load.force) || !finite(load.torque) || !finite(load.offset))
      throw DomainError("external load on '" + load.target + "' has a non-finite component");
    int frame = -1;
    if (const EndEffector* e = chain.effector(load.target)) frame = e->frame;
    else if (const auto j = chain.joint_index(load.target)) frame = *j;
    if (frame < 0) throw DomainError("external load applied to unknown frame '" + load.target + "'");
    const Eigen::Vector3d x = point_position(chain, ks, load.target, load.offset);
    const auto f = static_cast<std::size_t>(frame);
    ext_f[f] += load.force;
    ext_n[f] += load.torque + (x - ks.frames[f].position).cross(load.force);
  }

  std::vector<Eigen::Vector3d> w(n + 1, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> dw(n + 1, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> acc(n + 1, Eigen::Vector3d::Zero());
  acc[0] = -gravity;  // gravity enters as a base acceleration

  std::vector<Eigen::Vector3d> f(n + 1, Eigen::Vector3d::Zero());
  std::vector<Eigen::Vector3d> m(n + 1, Eigen::Vector3d::Zero());

  for (const auto& row : chain.rows()) {
    const auto j = static_cast<std::size_t>(row.j);
    const auto a = static_cast<std::size_t>(row.antecedent);
    const FramePose& fj = ks.frames[j];
    const Eigen::Vector3d z = fj.axis();
    const Eigen::Vector3d pa = a == 0 ? Eigen::Vector3d::Zero() : ks.frames[a].position;
    const Eigen::Vector3d d = fj.position - pa;
    const double rate = qd[row.j - 1];
    w[j] = w[a] + rate * z;
    dw[j] = dw[a] + qdd[row.j - 1] * z + w[a].cross(rate * z);
    acc[j] = acc[a] + dw[a].cross(d) + w[a].cross(w[a].cross(d));

    const LinkInertia& link = body.links()[j];
    const Eigen::Vector3d rc = fj.rotation * link.com;
    const Eigen::Vector3d ac = acc[j] + dw[j].cross(rc) + w[j].cross(w[j].cross(rc));
    const Eigen::Matrix3d iw = fj.rotation * link.inertia * fj.rotation.transpose();
    const Eigen::Vector3d F = link.mass * ac;
    f[j] = F - ext_f[j];
    m[j] = iw * dw[j] + w[j].cross(iw * w[j]) + rc.cross(F) - ext_n[j];
  }

  // Outboard to inboard: rows are ordered with a(j) < j.
  for (auto it = chain.rows().rbegin(); it != chain.rows().rend(); ++it) {
    const auto j = static_cast<std::size_t>(it->j);
    for (int c : chain.children()[j]) {
      const auto ci = static_cast<std::size_t>(c);
      f[j] += f[ci];
      m[j] += m[ci] + (ks.frames[ci].position - ks.frames[j].position).cross(f[ci]);
    }
  }

  std::vector<JointLoad> out;
  out.reserve(n);
  for (const auto& row : chain.rows()) {
    const auto j = static_cast<std::size_t>(row.j);
    JointLoad jl;
    jl.joint = row.j;
    jl.name = row.name;
    jl.moment = m[j].dot(ks.frames[j].axis());
    jl.reaction_force = f[j];
    jl.reaction_moment = m[j];
    if (!std::isfinite(jl.moment)) throw AnalysisError("non-finite moment at joint '" + row.name + "'");
    out.push_back(std::move(jl));
  }
  return out;
}

Eigen::Vector3d center_of_mass(const ChainModel& chain, const BodyModel& body, const PostureState& posture) {
  const KinematicState ks = forward_kinematics(chain, posture);
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  double mass = 0.0;
  for (std::size_t j = 1; j < body.links().size(); ++j) {
    const LinkInertia& l = body.links()[j];
    sum += l.mass * (ks.frames[j].position + ks.frames[j].rotation * l.com);
    mass += l.mass;
  }
  if (mass <= 0.0) throw AnalysisError("body has no mass");
  return sum / mass;
}

}  // namespace vhs
