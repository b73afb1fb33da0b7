#include "vhs/strength.hpp"

#include <cmath>
#include <cstdio>

#include <boost/math/distributions/normal.hpp>

#include "vhs/data.hpp"
#include "vhs/error.hpp"

namespace vhs {

namespace {

constexpr double kDomainSlack = 1e-9;  // deg

std::string format_deg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g deg", v);
  return buf;
}

}  // namespace

StrengthLibrary StrengthLibrary::load(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  StrengthLibrary lib;
  try {
    if (doc.at("schema_version").get<int>() != 1) throw ConfigError(path.string() + ": unsupported schema_version");
    for (const auto& p : doc.at("profiles")) {
      StrengthProfile prof;
      prof.joint = p.at("joint").get<std::string>();
      prof.gender = parse_gender(p.at("gender").get<std::string>());
      for (const auto& v : p.at("variables")) {
        StrengthVariable var{v.at("name").get<std::string>(), v.at("joint").get<std::string>(),
                             v.at("min").get<double>(), v.at("max").get<double>()};
        if (var.min_deg > var.max_deg) throw ConfigError("profile '" + prof.joint + "': empty domain for " + var.name);
        prof.variables.push_back(std::move(var));
      }
      prof.scale = p.value("scale", 1.0);
      for (const auto& t : p.at("terms")) {
        StrengthTerm term;
        term.coef = t.at("coef").get<double>();
        if (t.contains("powers")) term.powers = t.at("powers").get<std::map<std::string, int>>();
        for (const auto& [name, power] : term.powers) {
          bool known = false;
          for (const auto& v : prof.variables) known = known || v.name == name;
          if (!known) throw ConfigError("profile '" + prof.joint + "': term uses undeclared variable " + name);
          if (power < 0) throw ConfigError("profile '" + prof.joint + "': negative exponent on " + name);
        }
        prof.terms.push_back(std::move(term));
      }
      prof.cv = p.value("cv", 0.0);
      if (prof.cv < 0.0) throw ConfigError("profile '" + prof.joint + "': cv must be nonnegative");
      if (p.contains("provenance"))
        for (const auto& [k, v] : p.at("provenance").items()) prof.provenance[k] = v.get<std::string>();
      lib.profiles_.push_back(std::move(prof));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return lib;
}

StrengthLibrary StrengthLibrary::bundled() { return load(data_directory() / "strength.json"); }

const StrengthProfile& StrengthLibrary::find(const std::string& joint, Gender gender) const {
  for (const auto& p : profiles_)
    if (p.joint == joint && p.gender == gender) return p;
  throw ConfigError("no " + to_string(gender) + " strength profile for joint '" + joint + "'");
}

double joint_strength(const StrengthProfile& profile, const std::map<std::string, double>& angles_deg) {
  std::map<std::string, double> values;
  for (const auto& v : profile.variables) {
    auto it = angles_deg.find(v.name);
    if (it == angles_deg.end()) it = angles_deg.find(v.joint);
    if (it == angles_deg.end()) throw DomainError("strength profile '" + profile.joint + "' needs angle " + v.name);
    const double a = it->second;
    if (!std::isfinite(a) || a < v.min_deg - kDomainSlack || a > v.max_deg + kDomainSlack)
      throw DomainError("angle " + v.name + " (" + v.joint + ") = " + format_deg(a) + " lies outside [" +
                        format_deg(v.min_deg) + ", " + format_deg(v.max_deg) + "]");
    values[v.name] = a;
  }
  double sum = 0.0;
  for (const auto& t : profile.terms) {
    double term = t.coef;
    for (const auto& [name, power] : t.powers) term *= std::pow(values.at(name), power);
    sum += term;
  }
  const double s = profile.scale * sum;
  if (!(s > 0.0)) throw DomainError("strength profile '" + profile.joint + "' is nonpositive at the given angles");
  return s;
}

PopulationSpread PopulationSpread::from_cv(double mean, double cv) {
  if (!(mean > 0.0)) throw DomainError("mean strength must be positive");
  if (!(cv >= 0.0)) throw DomainError("coefficient of variation must be nonnegative");
  return {mean, cv * mean};
}

double percentile_strength(const PopulationSpread& spread, double z) {
  if (spread.sigma < 0.0) throw DomainError("strength sigma must be nonnegative");
  const double s = spread.mean + z * spread.sigma;
  if (!(s > 0.0)) throw DomainError("strength at z = " + std::to_string(z) + " is nonphysical (" + std::to_string(s) + " N m)");
  return s;
}

double percentile_to_z(double percentile) {
  if (!(percentile > 0.0 && percentile < 100.0)) throw DomainError("percentile must lie strictly between 0 and 100");
  return boost::math::quantile(boost::math::normal_distribution<double>(), percentile / 100.0);
}

}  // namespace vhs
