#include "vhs/fatigue.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>

#include <boost/math/tools/roots.hpp>

#include "vhs/data.hpp"
#include "vhs/error.hpp"

namespace vhs {

namespace {

constexpr int kGridPoints = 84;

void check_ratio(double f_mvc) {
  if (!(f_mvc > 0.0 && f_mvc <= 1.0))
    throw DomainError("f_MVC must lie in (0, 1], got " + std::to_string(f_mvc));
}

}  // namespace

FatigueParams FatigueParams::from_resistance(double m, double mvc) {
  FatigueParams p{mvc, m};
  p.validate();
  return p;
}

void FatigueParams::validate() const {
  if (!(std::isfinite(mvc) && mvc > 0.0)) throw DomainError("MVC must be positive");
  if (!(std::isfinite(resistance) && resistance > 0.0))
    throw DomainError("fatigue resistance must be positive, got " + std::to_string(resistance) + " min");
}

double decay_constant_load(const FatigueParams& params, double f_mvc, double t_min) {
  params.validate();
  check_ratio(f_mvc);
  if (!(t_min >= 0.0)) throw DomainError("time must be nonnegative");
  return std::exp(-params.k() * f_mvc * t_min);
}

std::vector<FatigueSample> integrate_variable_load(const FatigueParams& params,
                                                   const std::function<double(double)>& load_nm, double t_end_min,
                                                   double dt_min) {
  params.validate();
  if (!(dt_min > 0.0)) throw DomainError("integration step must be positive");
  if (!(t_end_min >= 0.0)) throw DomainError("end time must be nonnegative");

  const double k = params.k();
  auto rhs = [&](double t, double f) {
    const double load = load_nm(t);
    if (!std::isfinite(load) || load < 0.0)
      throw DomainError("load trajectory must be finite and nonnegative, got " + std::to_string(load) + " N m at t = " +
                        std::to_string(t) + " min");
    return -k * f / params.mvc * load;
  };

  std::vector<FatigueSample> out;
  double f = params.mvc;
  out.push_back({0.0, f, 1.0});
  const auto steps = static_cast<long>(std::ceil(t_end_min / dt_min - 1e-9));
  double t = 0.0;
  for (long i = 0; i < steps; ++i) {
    const double t_next = std::min(t_end_min, static_cast<double>(i + 1) * dt_min);
    const double h = t_next - t;
    const double k1 = rhs(t, f);
    const double k2 = rhs(t + h / 2, f + h / 2 * k1);
    const double k3 = rhs(t + h / 2, f + h / 2 * k2);
    const double k4 = rhs(t + h, f + h * k3);
    f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t = t_next;
    out.push_back({t * 60.0, f, f / params.mvc});
  }
  return out;
}

double met(const FatigueParams& params, double f_mvc) {
  params.validate();
  check_ratio(f_mvc);
  if (f_mvc == 1.0) return 0.0;
  return -std::log(f_mvc) / (params.k() * f_mvc);
}

double solve_fmvc_from_met(const FatigueParams& params, double met_min) {
  params.validate();
  if (!(met_min >= 0.0)) throw DomainError("MET must be nonnegative");
  if (met_min == 0.0) return 1.0;
  auto g = [&](double f) { return met(params, f) - met_min; };
  const double lo = 1e-300;
  if (g(lo) <= 0.0) throw DomainError("MET beyond the representable range");
  std::uintmax_t iterations = 2000;
  const auto [a, b] = boost::math::tools::bisect(g, lo, 1.0, boost::math::tools::eps_tolerance<double>(), iterations);
  return 0.5 * (a + b);
}

namespace {

void check_steps(const std::vector<LoadStep>& steps) {
  if (steps.empty()) throw DomainError("load schedule is empty");
  for (const auto& s : steps) {
    if (!(std::isfinite(s.f_mvc) && s.f_mvc >= 0.0)) throw DomainError("step load ratio must be finite and nonnegative");
    if (!(s.duration_min > 0.0)) throw DomainError("step duration must be positive");
  }
}

}  // namespace

double decay_piecewise(const FatigueParams& params, const std::vector<LoadStep>& steps, double t_min) {
  params.validate();
  check_steps(steps);
  if (!(t_min >= 0.0)) throw DomainError("time must be nonnegative");
  double exposure = 0.0;  // integral of f dt
  double remaining = t_min;
  for (std::size_t i = 0; i < steps.size() && remaining > 0.0; ++i) {
    const bool last = i + 1 == steps.size();
    const double dt = last ? remaining : std::min(remaining, steps[i].duration_min);
    exposure += steps[i].f_mvc * dt;
    remaining -= dt;
  }
  return std::exp(-params.k() * exposure);
}

std::optional<double> exhaustion_time(const FatigueParams& params, const std::vector<LoadStep>& steps) {
  params.validate();
  check_steps(steps);
  const double k = params.k();
  double exposure = 0.0;
  double t = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double f = steps[i].f_mvc;
    const bool last = i + 1 == steps.size();
    if (f > 0.0) {
      // Crossing when exp(-k (E + f tau)) = f.
      const double tau = std::max(0.0, (-std::log(f) / k - exposure) / f);
      if (last || tau <= steps[i].duration_min) return t + tau;
    }
    exposure += f * steps[i].duration_min;
    t += steps[i].duration_min;
  }
  return std::nullopt;
}

METModel METModel::make(std::string name, std::string_view expression, double lo, double hi, std::string subjects) {
  if (!(lo < hi)) throw SchemaError("model '" + name + "': empty domain");
  return METModel{std::move(name), Expression::parse(expression), lo, hi, std::move(subjects)};
}

std::vector<METModel> METModel::load(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = load_json(path);
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  std::vector<METModel> out;
  try {
    for (const auto& [key, _] : doc.items())
      if (key != "schema_version" && key != "description" && key != "models")
        throw SchemaError(path.string() + ": unknown key '" + key + "'");
    if (doc.at("schema_version").get<int>() != 1) throw SchemaError(path.string() + ": unsupported schema_version");
    for (const auto& m : doc.at("models")) {
      for (const auto& [key, _] : m.items())
        if (key != "name" && key != "expression" && key != "domain" && key != "subjects")
          throw SchemaError(path.string() + ": unknown key '" + key + "' in model");
      const auto domain = m.value("domain", std::vector<double>{0.16, 0.99});
      if (domain.size() != 2) throw SchemaError(path.string() + ": domain must be [lo, hi]");
      out.push_back(make(m.at("name").get<std::string>(), m.at("expression").get<std::string>(), domain[0], domain[1],
                         m.value("subjects", std::string{})));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  if (out.empty()) throw SchemaError(path.string() + ": no models defined");
  return out;
}

std::vector<double> regression_grid() {
  std::vector<double> x;
  x.reserve(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) x.push_back(static_cast<double>(16 + i) / 100.0);
  return x;
}

double regress_fatigue_resistance(const METModel& model) {
  const auto grid = regression_grid();
  if (model.domain_lo > grid.front() || model.domain_hi < grid.back())
    throw DomainError("model '" + model.name + "' is not defined over the whole regression grid");
  double num = 0.0;
  double den = 0.0;
  for (double x : grid) {
    const double p = -std::log(x) / x;
    const double f = model.formula(x);
    if (!std::isfinite(f)) throw DomainError("model '" + model.name + "' is not finite at x = " + std::to_string(x));
    num += p * f;
    den += p * p;
  }
  return num / den;
}

std::vector<FatigueResistanceEntry> load_resistance_registry(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  std::vector<FatigueResistanceEntry> out;
  try {
    for (const auto& g : doc.at("groups")) {
      FatigueResistanceEntry e{g.at("muscle_group").get<std::string>(), g.at("m_bar").get<double>(),
                               g.at("sigma_m").get<double>(), g.value("models", 0)};
      if (!(e.m_bar > 0.0) || !(e.sigma_m >= 0.0))
        throw ConfigError(path.string() + ": invalid resistance for " + e.muscle_group);
      out.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return out;
}

const std::vector<FatigueResistanceEntry>& resistance_registry() {
  static std::once_flag once;
  static std::vector<FatigueResistanceEntry> table;
  std::call_once(once, [] { table = load_resistance_registry(data_directory() / "fatigue_resistance.json"); });
  return table;
}

const FatigueResistanceEntry& find_resistance(const std::string& muscle_group) {
  for (const auto& e : resistance_registry())
    if (e.muscle_group == muscle_group) return e;
  throw ConfigError("unknown muscle group '" + muscle_group + "'");
}

GroupStatistics group_statistics(const std::vector<double>& values, bool sample_sigma) {
  if (values.empty()) throw DomainError("no values");
  if (sample_sigma && values.size() < 2) throw DomainError("sample sigma needs at least two values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double n = static_cast<double>(values.size()) - (sample_sigma ? 1.0 : 0.0);
  return {mean, std::sqrt(ss / n)};
}

}  // namespace vhs
