#include <atomic>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "vhs/error.hpp"
#include "vhs/fatigue.hpp"
#include "vhs/status.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitAnalysis = 3;

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// Maps library exceptions onto the documented exit codes.
template <class F>
int guarded(F&& body, std::ostream& err = std::cerr, const std::string& context = {}) {
  const std::string where = context.empty() ? "" : context + ": ";
  try {
    return body();
  } catch (const vhs::ExpressionParseError& e) {
    err << "error: expression: " << where << e.what() << '\n';
    return kExitSchema;
  } catch (const vhs::SchemaError& e) {
    err << "error: schema: " << where << e.what() << '\n';
    return kExitSchema;
  } catch (const vhs::ConfigError& e) {
    err << "error: configuration: " << where << e.what() << '\n';
    return kExitSchema;
  } catch (const vhs::AnalysisError& e) {
    err << "error: analysis: " << where << e.what() << '\n';
    return kExitAnalysis;
  } catch (const vhs::DomainError& e) {
    err << "error: domain: " << where << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::exception& e) {
    err << "error: " << where << e.what() << '\n';
    return kExitAnalysis;
  }
}

std::string summarize(const vhs::EvaluationReport& r, const std::vector<std::filesystem::path>& files) {
  std::ostringstream os;
  os << "scenario " << r.scenario << ": duration " << fmt("%.1f", r.duration_s) << " s\n";
  for (const auto& j : r.joints) {
    os << "  " << j.label << " (" << j.joint << "): moment " << fmt("%.3f", j.moment_nm) << " N m, capacity "
       << fmt("%.3f", j.mvc_nominal_nm) << " N m, load ratio " << fmt("%.4f", j.fmvc) << " (" << j.fmvc_source << ")";
    if (j.calibration_residual)
      os << ", inverse dynamics " << fmt("%.4f", j.fmvc_inverse_dynamics) << " (" << fmt("%+.2f", 100.0 * *j.calibration_residual)
         << " %)";
    os << ", MET " << (j.met_s ? fmt("%.2f", *j.met_s) + " s" : std::string("unbounded")) << '\n';
    os << "    normalized strength:";
    for (const auto& d : j.status) os << ' ' << fmt("%.0f", d.time_s) << " s=" << fmt("%.1f", 100.0 * d.normalized) << " %";
    os << '\n';
  }
  os << "  limiting joint: " << r.limiting_joint.value_or("none") << '\n';
  for (const auto& f : files) os << "  wrote " << f.string() << '\n';
  return os.str();
}

int cmd_evaluate(const std::vector<std::string>& paths, const std::string& out_dir, unsigned jobs) {
  std::vector<int> codes(paths.size(), kExitOk);
  std::vector<std::string> outputs(paths.size());
  std::vector<std::string> errors(paths.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < paths.size(); i = next++) {
      std::ostringstream err;
      codes[i] = guarded([&] {
        const vhs::ScenarioSpec spec = vhs::ScenarioSpec::load(paths[i]);
        const vhs::EvaluationReport report = vhs::evaluate_scenario(spec);
        std::filesystem::path dir = spec.output.directory.empty() ? std::filesystem::path("out") / spec.name
                                                                  : spec.output.directory;
        if (!out_dir.empty()) dir = paths.size() > 1 ? std::filesystem::path(out_dir) / spec.name : std::filesystem::path(out_dir);
        const auto files = vhs::write_report(report, dir);
        outputs[i] = summarize(report, files);
        for (const auto& w : report.warnings) err << "warning: " << spec.name << ": " << w << '\n';
        return kExitOk;
      }, err, paths[i]);
      errors[i] = err.str();
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << outputs[i];
    std::cerr << errors[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital human fatigue analysis: body model, joint loads, endurance and strength decay"};
  app.require_subcommand(1);

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate scenario files and write reports");
  std::vector<std::string> scenario_paths;
  std::string out_dir;
  unsigned jobs = 1;
  evaluate->add_option("scenarios", scenario_paths, "Scenario files")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--out-dir", out_dir, "Output directory (overrides the scenario's output block)");
  evaluate->add_option("--jobs,-j", jobs, "Scenarios evaluated in parallel")->check(CLI::PositiveNumber);

  auto* met_cmd = app.add_subcommand("met", "Maximum endurance time for a constant load ratio");
  double fmvc = 0.0;
  std::optional<double> resistance;
  std::string group;
  double offset = 0.0;
  met_cmd->add_option("--fmvc", fmvc, "Load ratio in (0, 1]")->required();
  auto* res_opt = met_cmd->add_option("--resistance", resistance, "Fatigue resistance m in min");
  met_cmd->add_option("--joint", group, "Muscle group from the resistance registry")->excludes(res_opt);
  met_cmd->add_option("--offset", offset, "Resistance offset in units of sigma_m (with --joint)");

  auto* regress = app.add_subcommand("regress", "Regress fatigue resistance from endurance model files");
  std::vector<std::string> model_files;
  bool sample_sigma = false;
  regress->add_option("models", model_files, "Model definition files")->required()->check(CLI::ExistingFile);
  regress->add_flag("--sample-sigma", sample_sigma, "Use the n-1 standard deviation for group statistics");

  auto* dump = app.add_subcommand("chain-dump", "Print the resolved 28-row kinematic table");
  double stature = 1.75;
  double weight = 75.0;
  dump->add_option("--stature", stature, "Body stature in m");
  dump->add_option("--weight", weight, "Body weight in kg");

  auto* strength = app.add_subcommand("strength", "Query a joint strength profile");
  std::string profile_name;
  std::string gender = "male";
  std::vector<std::string> angle_args;
  double z = 0.0;
  strength->add_option("--profile", profile_name, "Profile joint, e.g. elbow_flexion")->required();
  strength->add_option("--gender", gender, "male or female");
  strength->add_option("--angle", angle_args, "name=deg, e.g. alpha_e=90")->required();
  strength->add_option("--z", z, "Population offset in standard deviations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSchema;
  }

  if (*evaluate) return cmd_evaluate(scenario_paths, out_dir, jobs);

  if (*met_cmd) {
    return guarded([&] {
      double m = 0.0;
      if (resistance) {
        m = *resistance;
      } else if (!group.empty()) {
        const auto& e = vhs::find_resistance(group);
        m = e.m_bar + offset * e.sigma_m;
      } else {
        throw vhs::SchemaError("give --resistance or --joint");
      }
      if (!(fmvc > 0.0 && fmvc <= 1.0)) throw vhs::SchemaError("--fmvc must lie in (0, 1]");
      if (!(m > 0.0)) throw vhs::SchemaError("fatigue resistance must be positive");
      const double t = vhs::met(vhs::FatigueParams::from_resistance(m), fmvc);
      std::cout << "MET = " << fmt("%.2f", t * 60.0) << " s (" << fmt("%.4f", t) << " min) at f_MVC = " << fmt("%.4f", fmvc)
                << ", m = " << fmt("%.4f", m) << " min\n";
      return kExitOk;
    });
  }

  if (*regress) {
    return guarded([&] {
      std::vector<double> values;
      for (const auto& file : model_files) {
        for (const auto& model : vhs::METModel::load(file)) {
          const double m = vhs::regress_fatigue_resistance(model);
          values.push_back(m);
          std::cout << model.name << ": m = " << fmt("%.6f", m) << " min\n";
        }
      }
      const auto stats = vhs::group_statistics(values, sample_sigma && values.size() > 1);
      std::cout << "group: n = " << values.size() << ", mean m = " << fmt("%.6f", stats.mean) << " min, sigma_m = "
                << fmt("%.6f", stats.sigma) << " min (" << (sample_sigma ? "sample" : "population") << ")\n";
      return kExitOk;
    });
  }

  if (*dump) {
    return guarded([&] {
      vhs::Anthropometry a;
      a.stature_m = stature;
      a.body_weight_kg = weight;
      try {
        a.validate();
      } catch (const vhs::DomainError& e) {
        throw vhs::SchemaError(e.what());
      }
      const auto table = vhs::AnthropometryTable::bundled();
      const vhs::ChainModel chain = vhs::build_chain(vhs::scale_segments(table, a));
      double mass = 0.0;
      for (const auto& s : vhs::distribute_masses(table, a)) mass += s.mass_kg;
      std::cout << "stature " << fmt("%.4f", stature) << " m, body mass " << fmt("%.3f", mass) << " kg\n";
      for (const auto& r : chain.rows()) {
        char line[320];
        std::snprintf(line, sizeof line,
                      "%2d a=%2d u=%d sigma=%d gamma=%+.4f rad b=%+.4f m alpha=%+.4f rad d=%+.4f m r=%+.4f m "
                      "q_ini=%+.4f rad  %s\n",
                      r.j, r.antecedent, r.u, r.sigma, r.gamma, r.b, r.alpha, r.d, r.r, r.q_ini, r.name.c_str());
        std::cout << line;
      }
      return kExitOk;
    });
  }

  if (*strength) {
    return guarded([&] {
      std::map<std::string, double> angles;
      for (const auto& arg : angle_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw vhs::SchemaError("--angle expects name=deg, got '" + arg + "'");
        try {
          angles[arg.substr(0, eq)] = std::stod(arg.substr(eq + 1));
        } catch (const std::exception&) {
          throw vhs::SchemaError("--angle value is not a number in '" + arg + "'");
        }
      }
      vhs::Gender g{};
      try {
        g = vhs::parse_gender(gender);
      } catch (const vhs::DomainError& e) {
        throw vhs::SchemaError(e.what());
      }
      const auto lib = vhs::StrengthLibrary::bundled();
      const auto& profile = lib.find(profile_name, g);
      double s = 0.0;
      try {
        s = vhs::percentile_strength(vhs::PopulationSpread::from_cv(vhs::joint_strength(profile, angles), profile.cv), z);
      } catch (const vhs::DomainError& e) {
        throw vhs::SchemaError(e.what());
      }
      std::cout << profile.joint << " strength = " << fmt("%.3f", s) << " N m (z = " << fmt("%+.2f", z)
                << ", cv = " << fmt("%.4f", profile.cv) << ")\n";
      return kExitOk;
    });
  }
  return kExitSchema;
}
