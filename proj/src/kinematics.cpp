#include "vhs/kinematics.hpp"

#include <cmath>
#include <numbers>

#include "vhs/data.hpp"
#include "vhs/error.hpp"
#include "vhs/expression.hpp"

namespace vhs {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string expr_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return v.dump();
  return v.get<std::string>();
}

std::array<std::string, 3> expr_triplet(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-element vector of expressions");
  std::array<std::string, 3> out;
  for (std::size_t i = 0; i < 3; ++i) out[i] = j[i].is_number() ? j[i].dump() : j[i].get<std::string>();
  return out;
}

}  // namespace

ChainDefinition ChainDefinition::load(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  ChainDefinition def;
  try {
    if (doc.at("schema_version").get<int>() != 1) throw ConfigError(path.string() + ": unsupported schema_version");
    for (const auto& j : doc.at("joints")) {
      Row row;
      row.j = j.at("j").get<int>();
      row.antecedent = j.at("a").get<int>();
      row.u = j.at("u").get<int>();
      row.sigma = j.at("sigma").get<int>();
      row.gamma = expr_field(j, "gamma");
      row.b = expr_field(j, "b");
      row.alpha = expr_field(j, "alpha");
      row.d = expr_field(j, "d");
      row.r = expr_field(j, "r");
      row.q_ini = expr_field(j, "q_ini");
      row.name = j.at("name").get<std::string>();
      row.anatomical_sign = j.value("sign", 1);
      if (j.contains("limits_deg")) {
        const auto lim = j.at("limits_deg").get<std::array<double, 2>>();
        row.limit_lower_deg = lim[0];
        row.limit_upper_deg = lim[1];
      }
      def.rows.push_back(std::move(row));
    }
    if (doc.contains("end_effectors")) {
      for (const auto& e : doc.at("end_effectors"))
        def.effectors.push_back({e.at("name").get<std::string>(), e.at("frame").get<int>(), expr_triplet(e.at("offset"))});
    }
    if (doc.contains("segments")) {
      for (const auto& s : doc.at("segments")) {
        def.attachments.push_back({s.at("segment").get<std::string>(), s.at("frame").get<int>(),
                                   expr_triplet(s.at("proximal")), s.at("axis").get<std::string>(),
                                   s.value("lumped", false)});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return def;
}

ChainDefinition ChainDefinition::bundled() { return load(data_directory() / "chain.json"); }

ChainModel::ChainModel(std::vector<DHRow> rows, std::vector<JointAxis> limits, std::vector<EndEffector> effectors,
                       std::vector<SegmentAttachment> attachments, std::vector<SegmentGeometry> geometry)
    : rows_(std::move(rows)),
      limits_(std::move(limits)),
      effectors_(std::move(effectors)),
      attachments_(std::move(attachments)),
      geometry_(std::move(geometry)) {
  if (limits_.size() != rows_.size()) throw ConfigError("one joint limit entry is required per row");
  children_.assign(rows_.size() + 1, {});
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const DHRow& r = rows_[i];
    if (r.j != static_cast<int>(i) + 1) throw ConfigError("chain rows must be numbered 1..n in order");
    if (r.antecedent < 0 || r.antecedent >= r.j)
      throw ConfigError("row " + std::to_string(r.j) + ": antecedent must precede the joint");
    if (limits_[i].q_lower > limits_[i].q_upper)
      throw ConfigError("row " + std::to_string(r.j) + ": lower limit exceeds upper limit");
    children_[static_cast<std::size_t>(r.antecedent)].push_back(r.j);
  }
  const int n = static_cast<int>(rows_.size());
  for (const auto& e : effectors_)
    if (e.frame < 0 || e.frame > n) throw ConfigError("end effector '" + e.name + "' references an unknown frame");
  for (const auto& a : attachments_)
    if (a.frame < 0 || a.frame > n) throw ConfigError("segment '" + a.segment + "' references an unknown frame");
}

std::optional<int> ChainModel::joint_index(std::string_view name) const {
  for (const auto& r : rows_)
    if (r.name == name) return r.j;
  return std::nullopt;
}

const EndEffector* ChainModel::effector(std::string_view name) const {
  for (const auto& e : effectors_)
    if (e.name == name) return &e;
  return nullptr;
}

Eigen::VectorXd ChainModel::initial_q() const {
  Eigen::VectorXd q(static_cast<Eigen::Index>(rows_.size()));
  for (std::size_t i = 0; i < rows_.size(); ++i) q[static_cast<Eigen::Index>(i)] = rows_[i].q_ini;
  return q;
}

void ChainModel::set_limits(std::vector<JointAxis> limits) {
  if (limits.size() != rows_.size()) throw ConfigError("one joint limit entry is required per row");
  for (const auto& l : limits)
    if (l.q_lower > l.q_upper) throw ConfigError("joint '" + l.name + "': lower limit exceeds upper limit");
  limits_ = std::move(limits);
}

ChainModel build_chain(const std::vector<SegmentGeometry>& geometry) {
  return build_chain(ChainDefinition::bundled(), geometry);
}

ChainModel build_chain(const ChainDefinition& definition, const std::vector<SegmentGeometry>& geometry) {
  if (definition.rows.size() != 28)
    throw ConfigError("body chain must have 28 rows, found " + std::to_string(definition.rows.size()));

  Bindings symbols;
  for (const auto& [k, v] : length_symbols(geometry)) symbols.emplace(k, v);
  // Root coordinates enter as a world offset at evaluation time.
  symbols["X_r"] = 0.0;
  symbols["Y_r"] = 0.0;
  symbols["Z_r"] = 0.0;

  auto resolve = [&](const std::string& text, const std::string& where) {
    const Expression e = Expression::parse(text);
    for (const auto& v : e.variables())
      if (!symbols.contains(v)) throw ConfigError(where + ": missing segment symbol " + v);
    return e.evaluate(symbols);
  };

  std::vector<DHRow> rows;
  std::vector<JointAxis> limits;
  for (const auto& r : definition.rows) {
    const std::string where = "chain row " + std::to_string(r.j);
    DHRow row;
    row.j = r.j;
    row.antecedent = r.antecedent;
    row.u = r.u;
    row.sigma = r.sigma;
    row.gamma = resolve(r.gamma, where);
    row.b = resolve(r.b, where);
    row.alpha = resolve(r.alpha, where);
    row.d = resolve(r.d, where);
    row.r = resolve(r.r, where);
    row.q_ini = resolve(r.q_ini, where);
    row.name = r.name;
    row.anatomical_sign = r.anatomical_sign;
    // Limits are stored anatomically; convert to absolute coordinates.
    double lo = row.q_ini + row.anatomical_sign * r.limit_lower_deg * kDegToRad;
    double hi = row.q_ini + row.anatomical_sign * r.limit_upper_deg * kDegToRad;
    if (lo > hi) std::swap(lo, hi);
    limits.push_back({r.name, lo, hi});
    rows.push_back(std::move(row));
  }

  std::vector<EndEffector> effectors;
  for (const auto& e : definition.effectors) {
    const std::string where = "end effector " + e.name;
    effectors.push_back({e.name, e.frame,
                         {resolve(e.offset[0], where), resolve(e.offset[1], where), resolve(e.offset[2], where)}});
  }

  std::vector<SegmentAttachment> attachments;
  for (const auto& a : definition.attachments) {
    const std::string where = "segment " + a.segment;
    SegmentAttachment att;
    att.segment = a.segment;
    att.frame = a.frame;
    att.proximal = {resolve(a.proximal[0], where), resolve(a.proximal[1], where), resolve(a.proximal[2], where)};
    if (a.axis.size() != 2 || (a.axis[0] != '+' && a.axis[0] != '-') || a.axis[1] < 'x' || a.axis[1] > 'z')
      throw ConfigError(where + ": axis must be one of +x,-x,+y,-y,+z,-z");
    att.axis_sign = a.axis[0] == '+' ? 1.0 : -1.0;
    att.axis_index = a.axis[1] - 'x';
    att.lumped = a.lumped;
    attachments.push_back(std::move(att));
  }

  return ChainModel(std::move(rows), std::move(limits), std::move(effectors), std::move(attachments), geometry);
}

PostureState PostureState::initial(const ChainModel& chain) {
  PostureState p;
  p.q = chain.initial_q();
  p.q_dot = Eigen::VectorXd::Zero(p.q.size());
  p.q_ddot = Eigen::VectorXd::Zero(p.q.size());
  return p;
}

PostureState PostureState::from_anatomical(const ChainModel& chain, const std::map<std::string, double>& angles_deg,
                                           const Eigen::Vector3d& root) {
  PostureState p = initial(chain);
  p.root_position = root;
  for (const auto& [name, deg] : angles_deg) {
    const auto j = chain.joint_index(name);
    if (!j) throw ConfigError("unknown joint '" + name + "'");
    const DHRow& row = chain.row(*j);
    p.q[*j - 1] = row.q_ini + row.anatomical_sign * deg * kDegToRad;
  }
  return p;
}

double anatomical_angle_deg(const ChainModel& chain, const PostureState& posture, int j) {
  const DHRow& row = chain.row(j);
  return row.anatomical_sign * (posture.q[j - 1] - row.q_ini) / kDegToRad;
}

Eigen::Isometry3d dh_transform(const DHRow& row, double q) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.rotate(Eigen::AngleAxisd(row.gamma, Eigen::Vector3d::UnitZ()));
  t.translate(Eigen::Vector3d(0.0, 0.0, row.b));
  t.rotate(Eigen::AngleAxisd(row.alpha, Eigen::Vector3d::UnitX()));
  t.translate(Eigen::Vector3d(row.d, 0.0, 0.0));
  t.rotate(Eigen::AngleAxisd(q, Eigen::Vector3d::UnitZ()));
  t.translate(Eigen::Vector3d(0.0, 0.0, row.r));
  return t;
}

const FramePose& KinematicState::effector(std::string_view name) const {
  for (const auto& e : effectors)
    if (e.name == name) return e;
  throw ConfigError("unknown end effector '" + std::string(name) + "'");
}

KinematicState forward_kinematics(const ChainModel& chain, const PostureState& posture) {
  const auto n = static_cast<Eigen::Index>(chain.size());
  if (posture.q.size() != n)
    throw DomainError("posture has " + std::to_string(posture.q.size()) + " coordinates, chain has " +
                      std::to_string(n));

  KinematicState state;
  state.frames.resize(chain.size() + 1);
  state.frames[0].name = "base";
  std::vector<Eigen::Isometry3d> world(chain.size() + 1, Eigen::Isometry3d::Identity());
  for (const auto& row : chain.rows()) {
    Eigen::Isometry3d parent = world[static_cast<std::size_t>(row.antecedent)];
    if (row.antecedent == 0) parent.pretranslate(posture.root_position);
    world[static_cast<std::size_t>(row.j)] = parent * dh_transform(row, posture.q[row.j - 1]);
    FramePose& f = state.frames[static_cast<std::size_t>(row.j)];
    f.frame = row.j;
    f.name = row.name;
    f.rotation = world[static_cast<std::size_t>(row.j)].linear();
    f.position = world[static_cast<std::size_t>(row.j)].translation();
  }
  for (const auto& e : chain.effectors()) {
    const FramePose& base = state.frames[static_cast<std::size_t>(e.frame)];
    FramePose p;
    p.frame = e.frame;
    p.name = e.name;
    p.rotation = base.rotation;
    p.position = base.position + base.rotation * e.offset;
    state.effectors.push_back(std::move(p));
  }
  return state;
}

Eigen::Vector3d point_position(const ChainModel& chain, const KinematicState& state, std::string_view target,
                               const Eigen::Vector3d& local_offset) {
  for (const auto& e : state.effectors)
    if (e.name == target) return e.position + e.rotation * local_offset;
  if (const auto j = chain.joint_index(target)) {
    const FramePose& f = state.frames[static_cast<std::size_t>(*j)];
    return f.position + f.rotation * local_offset;
  }
  throw ConfigError("unknown frame '" + std::string(target) + "'");
}

std::vector<LimitViolation> check_limits(const ChainModel& chain, const PostureState& posture) {
  if (posture.q.size() != static_cast<Eigen::Index>(chain.size()))
    throw DomainError("posture dimension does not match the chain");
  std::vector<LimitViolation> out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const JointAxis& lim = chain.limits()[i];
    const double q = posture.q[static_cast<Eigen::Index>(i)];
    if (q > lim.q_upper) out.push_back({static_cast<int>(i) + 1, lim.name, q, lim.q_lower, lim.q_upper, q - lim.q_upper});
    else if (q < lim.q_lower)
      out.push_back({static_cast<int>(i) + 1, lim.name, q, lim.q_lower, lim.q_upper, lim.q_lower - q});
  }
  return out;
}

}  // namespace vhs
