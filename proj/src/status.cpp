#include "vhs/status.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vhs/data.hpp"
#include "vhs/error.hpp"

namespace vhs {

namespace {

constexpr double kTimeMergeSlack = 1e-9;  // s

std::string side_prefix(const std::string& joint) {
  if (joint.rfind("l_", 0) == 0) return "l_";
  if (joint.rfind("r_", 0) == 0) return "r_";
  return "";
}

std::map<std::string, double> merged_posture(const ScenarioSpec& spec, const Phase& phase) {
  std::map<std::string, double> angles = spec.posture_deg;
  for (const auto& [k, v] : phase.posture_deg) angles[k] = v;
  return angles;
}

std::vector<ExternalLoad> phase_loads(const ScenarioSpec& spec, double scale) {
  std::vector<ExternalLoad> out;
  for (const auto& load : spec.loads)
    for (const auto& share : load.sharing)
      out.push_back({share.target, share.offset, load.force * share.fraction * scale, load.torque * share.fraction * scale});
  return out;
}

// Angles of the profile variables, taken on the same side as the joint.
std::map<std::string, double> profile_angles(const ChainModel& chain, const PostureState& posture,
                                             const StrengthProfile& profile, const std::string& side) {
  std::map<std::string, double> out;
  for (const auto& v : profile.variables) {
    const auto j = chain.joint_index(side + v.joint);
    if (!j) throw ConfigError("strength variable " + v.name + " refers to unknown joint " + side + v.joint);
    out[v.name] = anatomical_angle_deg(chain, posture, *j);
  }
  return out;
}

std::string format_number(double v, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::string to_string(CellState s) {
  switch (s) {
    case CellState::ok: return "ok";
    case CellState::overloaded: return "overloaded";
    case CellState::nonphysical: return "nonphysical";
    case CellState::undefined_row: return "undefined";
  }
  return "unknown";
}

std::vector<StatusDelta> status_deltas(const std::vector<double>& times_s, const std::vector<double>& strengths_nm,
                                       double hs_max_nm) {
  if (times_s.size() != strengths_nm.size()) throw DomainError("status sequence lengths differ");
  if (!(hs_max_nm > 0.0)) throw DomainError("maximum strength must be positive");
  std::vector<StatusDelta> out;
  for (std::size_t i = 0; i < times_s.size(); ++i) {
    StatusDelta d;
    d.time_s = times_s[i];
    d.strength_nm = strengths_nm[i];
    d.normalized = strengths_nm[i] / hs_max_nm;
    if (i > 0) {
      d.change_nm = strengths_nm[i] - strengths_nm[i - 1];
      d.step_reduction = (strengths_nm[i - 1] - strengths_nm[i]) / hs_max_nm;
    }
    d.total_reduction = 1.0 - d.normalized;
    out.push_back(d);
  }
  return out;
}

PopulationGrid met_grid(double f_mean, double cv, const FatigueResistanceEntry& resistance,
                        const std::vector<double>& offsets, const std::vector<double>& z) {
  if (!(f_mean >= 0.0 && std::isfinite(f_mean))) throw DomainError("mean load ratio must be finite and nonnegative");
  PopulationGrid g;
  g.row_offsets = offsets;
  g.column_z = z;
  for (double o : offsets) {
    const double m = resistance.m_bar + o * resistance.sigma_m;
    g.row_resistance.push_back(m);
    std::vector<GridCell> row;
    for (double zc : z) {
      GridCell c;
      const double factor = 1.0 + zc * cv;
      if (!(m > 0.0)) {
        c.state = CellState::undefined_row;
        c.value = std::numeric_limits<double>::quiet_NaN();
      } else if (!(factor > 0.0)) {
        c.state = CellState::nonphysical;
        c.value = std::numeric_limits<double>::quiet_NaN();
      } else {
        c.f_mvc = f_mean / factor;
        if (c.f_mvc > 1.0) {
          c.state = CellState::overloaded;
          c.value = 0.0;
        } else if (c.f_mvc == 0.0) {
          c.value = std::numeric_limits<double>::infinity();
        } else {
          c.value = met(FatigueParams::from_resistance(m), c.f_mvc) * 60.0;
        }
      }
      row.push_back(c);
    }
    g.cells.push_back(std::move(row));
  }
  return g;
}

PopulationGrid reduction_grid(const std::vector<LoadStep>& schedule_mean, double cv,
                              const FatigueResistanceEntry& resistance, const std::vector<double>& offsets,
                              const std::vector<double>& z, double t_s) {
  if (!(t_s > 0.0)) throw DomainError("reduction time must be positive");
  PopulationGrid g;
  g.row_offsets = offsets;
  g.column_z = z;
  g.time_s = t_s;
  for (double o : offsets) {
    const double m = resistance.m_bar + o * resistance.sigma_m;
    g.row_resistance.push_back(m);
    std::vector<GridCell> row;
    for (double zc : z) {
      GridCell c;
      const double factor = 1.0 + zc * cv;
      if (!(m > 0.0)) {
        c.state = CellState::undefined_row;
        c.value = std::numeric_limits<double>::quiet_NaN();
      } else if (!(factor > 0.0)) {
        c.state = CellState::nonphysical;
        c.value = std::numeric_limits<double>::quiet_NaN();
      } else {
        std::vector<LoadStep> steps = schedule_mean;
        for (auto& s : steps) {
          s.f_mvc /= factor;
          if (s.f_mvc > 1.0) c.state = CellState::overloaded;
        }
        c.f_mvc = steps.front().f_mvc;
        const FatigueParams params = FatigueParams::from_resistance(m);
        c.value = 1.0 - decay_piecewise(params, steps, t_s / 60.0);
        const auto exhausted = exhaustion_time(params, steps);
        c.not_sustained = exhausted.has_value() && *exhausted * 60.0 < t_s;
      }
      row.push_back(c);
    }
    g.cells.push_back(std::move(row));
  }
  return g;
}

ModelData ModelData::bundled() {
  return {AnthropometryTable::bundled(), ChainDefinition::bundled(), StrengthLibrary::bundled(), resistance_registry()};
}

const FatigueResistanceEntry& ModelData::find_resistance(const std::string& group) const {
  for (const auto& e : resistance)
    if (e.muscle_group == group) return e;
  throw ConfigError("unknown muscle group '" + group + "'");
}

EvaluationReport evaluate_scenario(const ScenarioSpec& spec) { return evaluate_scenario(spec, ModelData::bundled()); }

EvaluationReport evaluate_scenario(const ScenarioSpec& spec, const ModelData& data) {
  if (spec.phases.empty()) throw SchemaError("scenario has no phases");
  EvaluationReport report;
  report.scenario = spec.name;
  report.anthropometry = spec.anthropometry;
  report.duration_s = spec.total_duration_s();

  const auto geometry = scale_segments(data.anthropometry, spec.anthropometry);
  const ChainModel chain = build_chain(data.chain, geometry);
  const BodyModel body(chain, distribute_masses(data.anthropometry, spec.anthropometry));

  // Per-phase posture, limit check and inverse dynamics.
  std::vector<PostureState> postures;
  std::vector<std::vector<JointLoad>> loads;
  std::set<std::string> reported;
  for (std::size_t p = 0; p < spec.phases.size(); ++p) {
    const Phase& phase = spec.phases[p];
    postures.push_back(PostureState::from_anatomical(chain, merged_posture(spec, phase), spec.root_position));
    for (const auto& v : check_limits(chain, postures.back())) {
      const std::string msg = "posture outside joint range: " + v.name + " at " +
                              format_number(anatomical_angle_deg(chain, postures.back(), v.joint)) + " deg";
      if (reported.insert(msg).second) report.warnings.push_back(msg + " (phase '" + phase.label + "')");
    }
    loads.push_back(inverse_dynamics_static(chain, body, postures.back(), phase_loads(spec, phase.load_scale), spec.gravity));
  }
  report.loads = loads.front();

  const double z_nominal =
      spec.anthropometry.strength_percentile == 50.0 ? 0.0 : percentile_to_z(spec.anthropometry.strength_percentile);

  // Sample grid: fixed interval plus phase boundaries.
  std::vector<double> boundaries{0.0};
  for (const auto& phase : spec.phases) boundaries.push_back(boundaries.back() + phase.duration_s);
  std::vector<double> sample_times;
  for (double t = 0.0; t < report.duration_s - kTimeMergeSlack;) {
    sample_times.push_back(t);
    t = static_cast<double>(sample_times.size()) * spec.output.sample_interval_s;
  }
  sample_times.insert(sample_times.end(), boundaries.begin(), boundaries.end());
  std::sort(sample_times.begin(), sample_times.end());
  sample_times.erase(std::unique(sample_times.begin(), sample_times.end(),
                                 [](double a, double b) { return std::abs(a - b) < kTimeMergeSlack; }),
                     sample_times.end());
  auto phase_of = [&](double t) {
    for (std::size_t p = 0; p < spec.phases.size(); ++p)
      if (t <= boundaries[p + 1] + kTimeMergeSlack) return static_cast<int>(p);
    return static_cast<int>(spec.phases.size()) - 1;
  };

  report.status.resize(boundaries.size());
  for (std::size_t i = 0; i < boundaries.size(); ++i) report.status[i].timestamp_s = boundaries[i];

  for (const auto& joi : spec.joints) {
    JointReport jr;
    jr.label = joi.label;
    jr.joint = joi.joint;
    jr.strength_profile = joi.strength_profile;
    jr.resistance_group = joi.resistance_group;
    const auto j = chain.joint_index(joi.joint);
    if (!j) throw ConfigError("joint of interest '" + joi.label + "' names unknown joint '" + joi.joint + "'");
    const StrengthProfile& profile = data.strength.find(joi.strength_profile, spec.anthropometry.gender);
    jr.cv = joi.cv.value_or(profile.cv);
    jr.resistance = data.find_resistance(joi.resistance_group);
    const std::string side = side_prefix(joi.joint);
    const int sign = chain.row(*j).anatomical_sign;

    std::vector<double> moment, mvc_mean, mvc_nominal;
    for (std::size_t p = 0; p < spec.phases.size(); ++p) {
      const double tau = loads[p][static_cast<std::size_t>(*j - 1)].moment;
      moment.push_back(std::abs(tau));
      const double s = joint_strength(profile, profile_angles(chain, postures[p], profile, side));
      mvc_mean.push_back(s);
      try {
        mvc_nominal.push_back(percentile_strength(PopulationSpread::from_cv(s, jr.cv), z_nominal));
      } catch (const DomainError& e) {
        throw AnalysisError("joint '" + joi.label + "': " + e.what());
      }
      if (p == 0) {
        jr.moment_nm = tau;
        jr.anatomical_moment_nm = sign * tau;
        if (sign * tau < 0.0)
          report.warnings.push_back("joint '" + joi.label + "' carries a moment opposite to its strength profile; the magnitude is used");
      }
    }
    jr.mvc_mean_nm = mvc_mean.front();
    jr.mvc_nominal_nm = mvc_nominal.front();
    jr.fmvc_inverse_dynamics = moment.front() / mvc_mean.front();

    double scale = 1.0;
    jr.fmvc_source = "inverse_dynamics";
    if (joi.calibration) {
      if (!(jr.fmvc_inverse_dynamics > 0.0))
        throw ConfigError("joint '" + joi.label + "': calibration needs a nonzero joint moment");
      scale = joi.calibration->reference_fmvc / jr.fmvc_inverse_dynamics;
      jr.fmvc_source = "calibration";
      jr.calibration_residual = jr.fmvc_inverse_dynamics / joi.calibration->reference_fmvc - 1.0;
      if (std::abs(*jr.calibration_residual) > joi.calibration->tolerance)
        report.warnings.push_back("joint '" + joi.label + "': inverse-dynamics load ratio " +
                                  format_number(jr.fmvc_inverse_dynamics) + " differs from the reference " +
                                  format_number(joi.calibration->reference_fmvc) + " by " +
                                  format_number(100.0 * *jr.calibration_residual, "%.2f") + " %");
    }

    std::vector<LoadStep> steps_nominal, steps_mean;
    for (std::size_t p = 0; p < spec.phases.size(); ++p) {
      const double dt = spec.phases[p].duration_s / 60.0;
      const double f = scale * moment[p] / mvc_nominal[p];
      if (f > 1.0)
        throw AnalysisError("immediate overload at joint '" + joi.label + "' in phase '" + spec.phases[p].label +
                            "': load ratio " + format_number(f));
      jr.phase_fmvc.push_back(f);
      steps_nominal.push_back({f, dt});
      steps_mean.push_back({scale * moment[p] / mvc_mean[p], dt});
    }
    jr.fmvc = jr.phase_fmvc.front();

    const FatigueParams params = FatigueParams::from_resistance(jr.resistance.m_bar, jr.mvc_nominal_nm);
    if (jr.fmvc > 0.0) jr.met_s = met(params, jr.fmvc) * 60.0;
    if (const auto ex = exhaustion_time(params, steps_nominal)) jr.exhaustion_s = *ex * 60.0;

    for (double t : sample_times) {
      const int p = phase_of(t);
      const double r = decay_piecewise(params, steps_nominal, t / 60.0);
      TimeSample s;
      s.time_s = t;
      s.joint = joi.label;
      s.normalized = r;
      s.f_cem_nm = r * mvc_nominal[static_cast<std::size_t>(p)];
      s.phase_index = p;
      s.sustained = !(jr.exhaustion_s && t > *jr.exhaustion_s + kTimeMergeSlack);
      report.series.push_back(std::move(s));
    }

    std::vector<double> hs;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
      const std::size_t p = i == 0 ? 0 : i - 1;
      const double value = decay_piecewise(params, steps_nominal, boundaries[i] / 60.0) * mvc_nominal[p];
      hs.push_back(value);
      report.status[i].strengths[joi.label] = value;
    }
    jr.status = status_deltas(boundaries, hs, mvc_nominal.front());

    jr.met = met_grid(steps_mean.front().f_mvc, jr.cv, jr.resistance, spec.population.met_offsets,
                      spec.population.strength_z);
    jr.reduction = reduction_grid(steps_mean, jr.cv, jr.resistance, spec.population.reduction_offsets,
                                  spec.population.strength_z,
                                  spec.population.reduction_time_s.value_or(report.duration_s));
    report.joints.push_back(std::move(jr));
  }

  // The joint reaching exhaustion first limits the work.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& jr : report.joints)
    if (jr.exhaustion_s && *jr.exhaustion_s < best) {
      best = *jr.exhaustion_s;
      report.limiting_joint = jr.label;
    }
  return report;
}

const JointReport& find_joint(const EvaluationReport& report, const std::string& label) {
  for (const auto& j : report.joints)
    if (j.label == label) return j;
  throw ConfigError("no joint labelled '" + label + "' in the report");
}

}  // namespace vhs
