#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vhs/dynamics.hpp"
#include "vhs/error.hpp"

using namespace vhs;

namespace {

const Eigen::Vector3d kZero = Eigen::Vector3d::Zero();

struct Body {
  ChainModel chain;
  BodyModel body;
  std::vector<SegmentDynamics> segments;
};

Body make_body(double stature = 1.75, double weight = 75.0) {
  Anthropometry a;
  a.stature_m = stature;
  a.body_weight_kg = weight;
  const auto table = AnthropometryTable::bundled();
  Body b{build_chain(scale_segments(table, a)), {}, distribute_masses(table, a)};
  b.body = BodyModel(b.chain, b.segments);
  return b;
}

PostureState random_posture(const ChainModel& chain, std::mt19937& rng) {
  PostureState p = PostureState::initial(chain);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    std::uniform_real_distribution<double> u(chain.limits()[i].q_lower, chain.limits()[i].q_upper);
    p.q[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return p;
}

std::vector<int> ancestors(const ChainModel& chain, int j) {
  std::vector<int> out;
  for (int k = j; k != 0; k = chain.row(k).antecedent) out.push_back(k);
  return out;
}

// Potential of gravity and constant external forces; its gradient is the
// static joint moment vector.
double potential(const ChainModel& chain, const BodyModel& body, const PostureState& p, const Eigen::Vector3d& g,
                 const std::vector<ExternalLoad>& loads) {
  const auto ks = forward_kinematics(chain, p);
  double u = 0.0;
  for (std::size_t j = 1; j < body.links().size(); ++j) {
    const auto& l = body.links()[j];
    u -= l.mass * g.dot(ks.frames[j].position + ks.frames[j].rotation * l.com);
  }
  for (const auto& load : loads) u -= load.force.dot(point_position(chain, ks, load.target, load.offset));
  return u;
}

// Kinetic energy from geometric Jacobian columns (independent of the recursion).
double kinetic(const ChainModel& chain, const BodyModel& body, const PostureState& p) {
  const auto ks = forward_kinematics(chain, p);
  double t = 0.0;
  for (std::size_t j = 1; j < body.links().size(); ++j) {
    const auto& l = body.links()[j];
    const Eigen::Vector3d c = ks.frames[j].position + ks.frames[j].rotation * l.com;
    Eigen::Vector3d v = Eigen::Vector3d::Zero(), w = Eigen::Vector3d::Zero();
    for (int i : ancestors(chain, static_cast<int>(j))) {
      const auto& fi = ks.frames[static_cast<std::size_t>(i)];
      const double rate = p.q_dot[i - 1];
      w += rate * fi.axis();
      v += rate * fi.axis().cross(c - fi.position);
    }
    const Eigen::Matrix3d iw = ks.frames[j].rotation * l.inertia * ks.frames[j].rotation.transpose();
    t += 0.5 * l.mass * v.squaredNorm() + 0.5 * w.dot(iw * w);
  }
  return t;
}

Eigen::VectorXd moments(const std::vector<JointLoad>& loads) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(loads.size()));
  for (std::size_t i = 0; i < loads.size(); ++i) m[static_cast<Eigen::Index>(i)] = loads[i].moment;
  return m;
}

}  // namespace

TEST_CASE("point mass on a horizontal lever") {
  SUBCASE("single joint, massless link") {
    DHRow row;
    row.j = 1;
    row.name = "hinge";
    ChainModel chain({row}, {{"hinge", -4, 4}}, {{"hand", 1, {0.6, 0.0, 0.0}}});
    BodyModel body(std::vector<LinkInertia>(2));
    PostureState p = PostureState::initial(chain);
    const auto loads = inverse_dynamics_static(chain, body, p, {{"hand", kZero, {0.0, -2.5 * 9.81, 0.0}, kZero}});
    CHECK(std::abs(std::abs(loads[0].moment) - 14.715) < 1e-9);
  }
  SUBCASE("full body, massless segments, arm held forward") {
    const double stature = 0.6 / (0.186 + 0.146);
    Body b = make_body(stature);
    BodyModel massless(std::vector<LinkInertia>(b.chain.size() + 1));
    const auto p = PostureState::from_anatomical(b.chain, {{"r_shoulder_flexion", 90}});
    const auto loads =
        inverse_dynamics_static(b.chain, massless, p, {{"r_wrist", kZero, {0.0, -2.5 * 9.81, 0.0}, kZero}});
    const int j = *b.chain.joint_index("r_shoulder_flexion");
    CHECK(std::abs(std::abs(loads[static_cast<std::size_t>(j - 1)].moment) - 14.715) < 1e-9);
  }
}

TEST_CASE("unloaded system carries no moment") {
  Body b = make_body();
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto loads = inverse_dynamics_static(b.chain, b.body, random_posture(b.chain, rng), {}, Eigen::Vector3d::Zero());
    for (const auto& l : loads) CHECK(l.moment == 0.0);
  }
}

TEST_CASE("root reaction balances weight and external forces") {
  Body b = make_body();
  std::mt19937 rng(5);
  const double mass = b.body.total_mass();
  CHECK(std::abs(mass - 75.0) / 75.0 < 1e-9);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_posture(b.chain, rng);
    const std::vector<ExternalLoad> ext{{"r_palm", kZero, {3.0, -24.525, 24.5}, {0.1, 0.2, 0.3}},
                                        {"l_palm", kZero, {-1.0, -24.525, 24.5}, kZero}};
    const auto loads = inverse_dynamics_static(b.chain, b.body, p, ext);
    const Eigen::Vector3d expected = -(mass * kDefaultGravity + ext[0].force + ext[1].force);
    CHECK((loads[0].reaction_force - expected).norm() < 1e-9);
  }
}

TEST_CASE("superposition of gravity and external loads") {
  Body b = make_body();
  std::mt19937 rng(9);
  const std::vector<ExternalLoad> ext{{"r_palm", kZero, {0.0, -24.525, 24.5}, kZero}, {"head_top", kZero, {5.0, 0.0, 0.0}, {0, 1, 0}}};
  for (int i = 0; i < 20; ++i) {
    const auto p = random_posture(b.chain, rng);
    const auto both = moments(inverse_dynamics_static(b.chain, b.body, p, ext));
    const auto grav = moments(inverse_dynamics_static(b.chain, b.body, p, {}));
    const auto load = moments(inverse_dynamics_static(b.chain, b.body, p, ext, Eigen::Vector3d::Zero()));
    CHECK((both - grav - load).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("virtual work: static moments are the gradient of the potential") {
  Body b = make_body();
  std::mt19937 rng(13);
  const std::vector<ExternalLoad> ext{{"r_palm", {0.01, 0.0, 0.02}, {0.0, -24.525, 24.5}, kZero},
                                      {"l_sole", kZero, {0.0, 300.0, 0.0}, kZero}};
  const double h = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = random_posture(b.chain, rng);
    const auto tau = moments(inverse_dynamics_static(b.chain, b.body, p, ext));
    const double scale = tau.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < p.q.size(); ++i) {
      PostureState plus = p, minus = p;
      plus.q[i] += h;
      minus.q[i] -= h;
      const double grad = (potential(b.chain, b.body, plus, kDefaultGravity, ext) -
                           potential(b.chain, b.body, minus, kDefaultGravity, ext)) /
                          (2 * h);
      INFO("trial " << trial << " joint " << i + 1 << " grad " << grad << " tau " << tau[i]);
      CHECK(std::abs(grad - tau[i]) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("single pendulum equation of motion") {
  DHRow row;
  row.j = 1;
  row.name = "pivot";
  ChainModel chain({row}, {{"pivot", -10, 10}});
  LinkInertia link;
  link.mass = 2.0;
  link.com = {0.0, -0.4, 0.0};  // hangs straight down at q = 0
  link.inertia = Eigen::Vector3d(0.01, 0.02, 0.03).asDiagonal();
  BodyModel body({LinkInertia{}, link});
  const double g = 9.81;
  for (double q : {-1.2, 0.0, 0.4, 2.0}) {
    for (double qdd : {-3.0, 0.0, 5.0}) {
      PostureState p = PostureState::initial(chain);
      p.q[0] = q;
      p.q_dot = Eigen::VectorXd::Constant(1, 1.7);
      p.q_ddot = Eigen::VectorXd::Constant(1, qdd);
      const double expected = (0.03 + 2.0 * 0.16) * qdd + 2.0 * g * 0.4 * std::sin(q);
      CHECK(general_inverse_dynamics(chain, body, p, {})[0].moment == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("power balance over the whole body") {
  Body b = make_body();
  std::mt19937 rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    PostureState p = random_posture(b.chain, rng);
    p.q_dot = Eigen::VectorXd::NullaryExpr(p.q.size(), [&] { return n(rng); });
    p.q_ddot = Eigen::VectorXd::NullaryExpr(p.q.size(), [&] { return n(rng); });
    const auto tau = moments(general_inverse_dynamics(b.chain, b.body, p, {}));
    auto energy = [&](double dt) {
      PostureState s = p;
      s.q = p.q + dt * p.q_dot + 0.5 * dt * dt * p.q_ddot;
      s.q_dot = p.q_dot + dt * p.q_ddot;
      return kinetic(b.chain, b.body, s) + potential(b.chain, b.body, s, kDefaultGravity, {});
    };
    const double de_dt = (energy(h) - energy(-h)) / (2 * h);
    const double power = tau.dot(p.q_dot);
    CHECK(std::abs(power - de_dt) <= 1e-6 * std::max(1.0, std::abs(power)));
  }
}

TEST_CASE("static specialization is exact") {
  Body b = make_body();
  std::mt19937 rng(19);
  const auto p0 = random_posture(b.chain, rng);
  PostureState p = p0;
  p.q_dot = Eigen::VectorXd::Zero(p.q.size());
  p.q_ddot = Eigen::VectorXd::Zero(p.q.size());
  const std::vector<ExternalLoad> ext{{"r_palm", kZero, {0.0, -24.525, 24.5}, kZero}};
  const auto s = inverse_dynamics_static(b.chain, b.body, p0, ext);
  const auto g = general_inverse_dynamics(b.chain, b.body, p, ext);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].moment == g[i].moment);
    CHECK(s[i].reaction_force == g[i].reaction_force);
  }
}

TEST_CASE("gravity moments are linear in mass") {
  Body b = make_body();
  std::mt19937 rng(23);
  const auto p = random_posture(b.chain, rng);
  const auto one = moments(inverse_dynamics_static(b.chain, b.body, p, {}));
  const auto two = moments(inverse_dynamics_static(b.chain, b.body.scaled(2.0), p, {}));
  CHECK((two - 2.0 * one).cwiseAbs().maxCoeff() <= 1e-9 * one.cwiseAbs().maxCoeff());
}

TEST_CASE("invalid loads are rejected") {
  Body b = make_body();
  const auto p = PostureState::initial(b.chain);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(inverse_dynamics_static(b.chain, b.body, p, {{"r_palm", kZero, {nan, 0, 0}, kZero}}), DomainError);
  CHECK_THROWS_AS(
      inverse_dynamics_static(b.chain, b.body, p, {{"r_palm", kZero, {0, 0, 0}, {std::numeric_limits<double>::infinity(), 0, 0}}}),
      DomainError);
  CHECK_THROWS_AS(inverse_dynamics_static(b.chain, b.body, p, {{"tail", kZero, {0, 1, 0}, kZero}}), DomainError);
}

TEST_CASE("every segment is mounted") {
  Body b = make_body();
  std::size_t mounted = 0;
  for (const auto& l : b.body.links()) mounted += l.segments.size();
  CHECK(mounted == b.segments.size());
  auto segs = b.segments;
  segs.pop_back();
  CHECK_THROWS_AS(BodyModel(b.chain, segs), ConfigError);
}
