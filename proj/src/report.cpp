#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vhs/error.hpp"
#include "vhs/status.hpp"

namespace vhs {

namespace {

using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_number(const std::optional<T>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

json vec_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json grid_json(const PopulationGrid& g, const char* unit) {
  json cells = json::array();
  for (const auto& row : g.cells) {
    json r = json::array();
    for (const auto& c : row) {
      json cell{{"value", number_or_null(c.value)}, {"state", to_string(c.state)}, {"f_mvc", c.f_mvc}};
      if (g.time_s > 0.0) cell["not_sustained"] = c.not_sustained;
      r.push_back(cell);
    }
    cells.push_back(r);
  }
  json out{{"unit", unit},
           {"row_offsets_sigma_m", g.row_offsets},
           {"row_resistance_min", g.row_resistance},
           {"column_strength_z", g.column_z},
           {"cells", cells}};
  if (g.time_s > 0.0) out["time_s"] = g.time_s;
  return out;
}

std::string fixed(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string file_label(const std::string& label) {
  std::string out;
  for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  return out;
}

std::string z_header(double z) {
  if (z == 0.0) return "S";
  char buf[32];
  std::snprintf(buf, sizeof buf, "S%+gsigma", z);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw AnalysisError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw AnalysisError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string grid_csv(const PopulationGrid& g, const char* unit, double value_scale) {
  std::ostringstream os;
  os << "resistance_offset_sigma_m,resistance_min";
  for (double z : g.column_z) os << ',' << z_header(z) << '_' << unit;
  os << '\n';
  for (std::size_t r = 0; r < g.cells.size(); ++r) {
    os << fixed(g.row_offsets[r], 3) << ',' << fixed(g.row_resistance[r], 4);
    for (const auto& c : g.cells[r]) {
      os << ',';
      if (c.state == CellState::ok || c.state == CellState::overloaded) os << fixed(c.value * value_scale, 4);
      else os << to_string(c.state);
    }
    os << '\n';
  }
  return os.str();
}

std::string flags_csv(const PopulationGrid& g) {
  std::ostringstream os;
  os << "resistance_offset_sigma_m,resistance_min";
  for (double z : g.column_z) os << ',' << z_header(z);
  os << '\n';
  for (std::size_t r = 0; r < g.cells.size(); ++r) {
    os << fixed(g.row_offsets[r], 3) << ',' << fixed(g.row_resistance[r], 4);
    for (const auto& c : g.cells[r]) {
      os << ',';
      if (c.state != CellState::ok) os << to_string(c.state);
      else os << (c.not_sustained ? "not_sustained" : "sustained");
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

nlohmann::json to_json(const EvaluationReport& report) {
  json joints = json::array();
  for (const auto& j : report.joints) {
    json status = json::array();
    for (const auto& d : j.status)
      status.push_back({{"time_s", d.time_s},
                        {"strength_Nm", d.strength_nm},
                        {"change_Nm", d.change_nm},
                        {"normalized_strength", d.normalized},
                        {"step_reduction", d.step_reduction},
                        {"total_reduction", d.total_reduction}});
    json calibration = nullptr;
    if (j.calibration_residual) calibration = {{"relative_residual", *j.calibration_residual}};
    joints.push_back({{"label", j.label},
                      {"joint", j.joint},
                      {"strength_profile", j.strength_profile},
                      {"resistance_group", j.resistance_group},
                      {"resistance_min", {{"m_bar", j.resistance.m_bar}, {"sigma_m", j.resistance.sigma_m}}},
                      {"cv", j.cv},
                      {"moment_Nm", j.moment_nm},
                      {"anatomical_moment_Nm", j.anatomical_moment_nm},
                      {"mvc_mean_Nm", j.mvc_mean_nm},
                      {"mvc_nominal_Nm", j.mvc_nominal_nm},
                      {"fmvc_inverse_dynamics", j.fmvc_inverse_dynamics},
                      {"fmvc", j.fmvc},
                      {"fmvc_source", j.fmvc_source},
                      {"calibration", calibration},
                      {"phase_fmvc", j.phase_fmvc},
                      {"met_s", optional_number(j.met_s)},
                      {"exhaustion_s", optional_number(j.exhaustion_s)},
                      {"status", status},
                      {"met_grid", grid_json(j.met, "s")},
                      {"reduction_grid", grid_json(j.reduction, "ratio")}});
  }
  json loads = json::array();
  for (const auto& l : report.loads)
    loads.push_back({{"joint", l.joint},
                     {"name", l.name},
                     {"moment_Nm", l.moment},
                     {"reaction_force_N", vec_json(l.reaction_force)}});
  json status = json::array();
  for (const auto& hs : report.status) status.push_back({{"time_s", hs.timestamp_s}, {"strengths_Nm", hs.strengths}});
  return {{"schema_version", 1},
          {"scenario", report.scenario},
          {"anthropometry",
           {{"stature_m", report.anthropometry.stature_m},
            {"body_weight_kg", report.anthropometry.body_weight_kg},
            {"gender", to_string(report.anthropometry.gender)},
            {"strength_percentile", report.anthropometry.strength_percentile}}},
          {"duration_s", report.duration_s},
          {"limiting_joint", report.limiting_joint ? json(*report.limiting_joint) : json(nullptr)},
          {"warnings", report.warnings},
          {"joints", joints},
          {"human_status", status},
          {"joint_loads", loads}};
}

std::vector<std::filesystem::path> write_report(const EvaluationReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = directory / name;
    write_atomic(path, content);
    written.push_back(path);
  };

  emit("report.json", to_json(report).dump(2) + "\n");

  std::ostringstream series;
  series << "time_s,joint,F_cem_Nm,normalized_strength,phase_index,sustained\n";
  for (const auto& s : report.series)
    series << fixed(s.time_s, 3) << ',' << s.joint << ',' << fixed(s.f_cem_nm) << ',' << fixed(s.normalized, 9) << ','
           << s.phase_index << ',' << (s.sustained ? 1 : 0) << '\n';
  emit("timeseries.csv", series.str());

  for (const auto& j : report.joints) {
    const std::string label = file_label(j.label);
    std::ostringstream st;
    st << "time_s,strength_Nm,normalized_strength,step_reduction,total_reduction\n";
    for (const auto& d : j.status)
      st << fixed(d.time_s, 3) << ',' << fixed(d.strength_nm) << ',' << fixed(d.normalized, 9) << ','
         << fixed(d.step_reduction, 9) << ',' << fixed(d.total_reduction, 9) << '\n';
    emit("status_" + label + ".csv", st.str());
    emit("met_grid_" + label + ".csv", grid_csv(j.met, "s", 1.0));
    emit("reduction_grid_" + label + ".csv", grid_csv(j.reduction, "pct", 100.0));
    emit("reduction_flags_" + label + ".csv", flags_csv(j.reduction));
  }
  return written;
}

}  // namespace vhs
