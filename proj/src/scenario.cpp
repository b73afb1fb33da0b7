#include "vhs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "vhs/error.hpp"

namespace vhs {

namespace {

using nlohmann::json;

constexpr double kShareTolerance = 1e-9;

void check_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
  check_object(j, where);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw SchemaError(where + ": unknown key '" + key + "'");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw SchemaError(where + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(where + ": expected a finite number");
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) throw SchemaError(where + ": expected a string");
  return j.get<std::string>();
}

Eigen::Vector3d vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(where + ": expected [x, y, z]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::map<std::string, double> angles(const json& j, const std::string& where) {
  check_object(j, where);
  std::map<std::string, double> out;
  for (const auto& [name, v] : j.items()) out[name] = number(v, where + "." + name);
  return out;
}

void check_unit(const json& j, const char* expected, const std::string& where) {
  if (j.contains("unit") && text(j.at("unit"), where + ".unit") != expected)
    throw SchemaError(where + ".unit: expected \"" + expected + "\"");
}

Anthropometry parse_anthropometry(const json& j, const std::string& where) {
  check_keys(j, {"stature_m", "body_weight_kg", "gender", "strength_percentile"}, where);
  Anthropometry a;
  if (j.contains("stature_m")) a.stature_m = number(j.at("stature_m"), where + ".stature_m");
  if (j.contains("body_weight_kg")) a.body_weight_kg = number(j.at("body_weight_kg"), where + ".body_weight_kg");
  if (j.contains("gender")) {
    try {
      a.gender = parse_gender(text(j.at("gender"), where + ".gender"));
    } catch (const DomainError& e) {
      throw SchemaError(where + ".gender: " + e.what());
    }
  }
  if (j.contains("strength_percentile"))
    a.strength_percentile = number(j.at("strength_percentile"), where + ".strength_percentile");
  try {
    a.validate();
  } catch (const DomainError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return a;
}

ScenarioLoad parse_load(const json& j, const std::string& where) {
  check_keys(j, {"name", "force_N", "torque_Nm", "target", "offset_m", "sharing"}, where);
  ScenarioLoad load;
  load.name = j.contains("name") ? text(j.at("name"), where + ".name") : where;
  if (j.contains("force_N")) load.force = vec3(j.at("force_N"), where + ".force_N");
  if (j.contains("torque_Nm")) load.torque = vec3(j.at("torque_Nm"), where + ".torque_Nm");
  if (j.contains("target") == j.contains("sharing"))
    throw SchemaError(where + ": give exactly one of 'target' or 'sharing'");
  if (j.contains("target")) {
    LoadShare s;
    s.target = text(j.at("target"), where + ".target");
    if (j.contains("offset_m")) s.offset = vec3(j.at("offset_m"), where + ".offset_m");
    load.sharing.push_back(std::move(s));
    return load;
  }
  if (j.contains("offset_m")) throw SchemaError(where + ": 'offset_m' belongs inside each sharing entry");
  const json& sharing = j.at("sharing");
  if (!sharing.is_array() || sharing.empty()) throw SchemaError(where + ".sharing: expected a nonempty array");
  double total = 0.0;
  for (std::size_t i = 0; i < sharing.size(); ++i) {
    const std::string w = where + ".sharing[" + std::to_string(i) + "]";
    check_keys(sharing[i], {"target", "fraction", "offset_m"}, w);
    LoadShare s;
    s.target = text(require(sharing[i], "target", w), w + ".target");
    s.fraction = number(require(sharing[i], "fraction", w), w + ".fraction");
    if (s.fraction < 0.0 || s.fraction > 1.0) throw SchemaError(w + ".fraction: must lie in [0, 1]");
    if (sharing[i].contains("offset_m")) s.offset = vec3(sharing[i].at("offset_m"), w + ".offset_m");
    total += s.fraction;
    load.sharing.push_back(std::move(s));
  }
  if (std::abs(total - 1.0) > kShareTolerance) throw SchemaError(where + ".sharing: fractions must sum to 1");
  return load;
}

std::vector<Phase> parse_phases(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw SchemaError(where + ": expected a nonempty array");
  std::vector<Phase> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_keys(j[i], {"label", "duration_s", "load_scale", "posture", "repeat"}, w);
    Phase p;
    p.label = j[i].contains("label") ? text(j[i].at("label"), w + ".label") : "phase " + std::to_string(i + 1);
    p.duration_s = number(require(j[i], "duration_s", w), w + ".duration_s");
    if (!(p.duration_s > 0.0)) throw SchemaError(w + ".duration_s: must be positive");
    if (j[i].contains("load_scale")) p.load_scale = number(j[i].at("load_scale"), w + ".load_scale");
    if (p.load_scale < 0.0) throw SchemaError(w + ".load_scale: must be nonnegative");
    if (j[i].contains("posture")) {
      const json& posture = j[i].at("posture");
      check_keys(posture, {"unit", "angles"}, w + ".posture");
      check_unit(posture, "deg", w + ".posture");
      p.posture_deg = angles(require(posture, "angles", w + ".posture"), w + ".posture.angles");
    }
    int repeat = 1;
    if (j[i].contains("repeat")) {
      if (!j[i].at("repeat").is_number_integer() || j[i].at("repeat").get<int>() < 1)
        throw SchemaError(w + ".repeat: expected a positive integer");
      repeat = j[i].at("repeat").get<int>();
    }
    for (int r = 0; r < repeat; ++r) {
      Phase copy = p;
      if (repeat > 1) copy.label = p.label + " " + std::to_string(r + 1);
      out.push_back(std::move(copy));
    }
  }
  return out;
}

PopulationSelectors parse_population(const json& j, const std::string& where) {
  check_keys(j, {"strength_z", "met_offsets", "reduction_offsets", "reduction_time_s"}, where);
  PopulationSelectors p;
  if (j.contains("strength_z")) p.strength_z = numbers(j.at("strength_z"), where + ".strength_z");
  if (j.contains("met_offsets")) p.met_offsets = numbers(j.at("met_offsets"), where + ".met_offsets");
  if (j.contains("reduction_offsets")) p.reduction_offsets = numbers(j.at("reduction_offsets"), where + ".reduction_offsets");
  if (j.contains("reduction_time_s")) {
    p.reduction_time_s = number(j.at("reduction_time_s"), where + ".reduction_time_s");
    if (!(*p.reduction_time_s > 0.0)) throw SchemaError(where + ".reduction_time_s: must be positive");
  }
  return p;
}

JointOfInterest parse_joint(const json& j, const std::string& where) {
  check_keys(j, {"label", "joint", "strength_profile", "resistance_group", "cv", "calibration"}, where);
  JointOfInterest out;
  out.joint = text(require(j, "joint", where), where + ".joint");
  out.label = j.contains("label") ? text(j.at("label"), where + ".label") : out.joint;
  out.strength_profile = text(require(j, "strength_profile", where), where + ".strength_profile");
  out.resistance_group = text(require(j, "resistance_group", where), where + ".resistance_group");
  if (j.contains("cv")) {
    out.cv = number(j.at("cv"), where + ".cv");
    if (*out.cv < 0.0) throw SchemaError(where + ".cv: must be nonnegative");
  }
  if (j.contains("calibration")) {
    const std::string w = where + ".calibration";
    check_keys(j.at("calibration"), {"reference_fmvc", "tolerance"}, w);
    Calibration c;
    c.reference_fmvc = number(require(j.at("calibration"), "reference_fmvc", w), w + ".reference_fmvc");
    if (!(c.reference_fmvc > 0.0 && c.reference_fmvc <= 1.0)) throw SchemaError(w + ".reference_fmvc: must lie in (0, 1]");
    if (j.at("calibration").contains("tolerance")) c.tolerance = number(j.at("calibration").at("tolerance"), w + ".tolerance");
    if (!(c.tolerance > 0.0)) throw SchemaError(w + ".tolerance: must be positive");
    out.calibration = c;
  }
  return out;
}

}  // namespace

double ScenarioSpec::total_duration_s() const {
  double t = 0.0;
  for (const auto& p : phases) t += p.duration_s;
  return t;
}

ScenarioSpec ScenarioSpec::parse(const json& doc, const std::string& origin) {
  check_keys(doc,
             {"schema_version", "name", "description", "anthropometry", "gravity_mps2", "posture", "loads", "phases",
              "population", "joints", "output"},
             origin);
  const json& version = require(doc, "schema_version", origin);
  if (!version.is_number_integer() || version.get<int>() != 1)
    throw SchemaError(origin + ".schema_version: only version 1 is supported");

  ScenarioSpec s;
  s.name = doc.contains("name") ? text(doc.at("name"), origin + ".name") : "scenario";
  if (doc.contains("description")) s.description = text(doc.at("description"), origin + ".description");
  if (doc.contains("anthropometry")) s.anthropometry = parse_anthropometry(doc.at("anthropometry"), origin + ".anthropometry");
  if (doc.contains("gravity_mps2")) s.gravity = vec3(doc.at("gravity_mps2"), origin + ".gravity_mps2");

  const std::string pw = origin + ".posture";
  const json& posture = require(doc, "posture", origin);
  check_keys(posture, {"unit", "angles", "root_position_m"}, pw);
  check_unit(posture, "deg", pw);
  s.posture_deg = angles(require(posture, "angles", pw), pw + ".angles");
  if (posture.contains("root_position_m")) s.root_position = vec3(posture.at("root_position_m"), pw + ".root_position_m");

  if (doc.contains("loads")) {
    const json& loads = doc.at("loads");
    if (!loads.is_array()) throw SchemaError(origin + ".loads: expected an array");
    for (std::size_t i = 0; i < loads.size(); ++i)
      s.loads.push_back(parse_load(loads[i], origin + ".loads[" + std::to_string(i) + "]"));
  }

  s.phases = parse_phases(require(doc, "phases", origin), origin + ".phases");
  if (doc.contains("population")) s.population = parse_population(doc.at("population"), origin + ".population");

  const json& joints = require(doc, "joints", origin);
  if (!joints.is_array() || joints.empty()) throw SchemaError(origin + ".joints: expected a nonempty array");
  for (std::size_t i = 0; i < joints.size(); ++i)
    s.joints.push_back(parse_joint(joints[i], origin + ".joints[" + std::to_string(i) + "]"));

  if (doc.contains("output")) {
    const std::string ow = origin + ".output";
    check_keys(doc.at("output"), {"directory", "sample_interval_s"}, ow);
    if (doc.at("output").contains("directory")) s.output.directory = text(doc.at("output").at("directory"), ow + ".directory");
    if (doc.at("output").contains("sample_interval_s"))
      s.output.sample_interval_s = number(doc.at("output").at("sample_interval_s"), ow + ".sample_interval_s");
    if (!(s.output.sample_interval_s > 0.0)) throw SchemaError(ow + ".sample_interval_s: must be positive");
  }
  return s;
}

ScenarioSpec ScenarioSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return parse(doc, path.filename().string());
}

}  // namespace vhs
