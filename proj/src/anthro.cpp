#include "vhs/anthro.hpp"

#include <cmath>

#include "vhs/data.hpp"
#include "vhs/error.hpp"

namespace vhs {

Gender parse_gender(const std::string& text) {
  if (text == "male") return Gender::male;
  if (text == "female") return Gender::female;
  throw DomainError("unknown gender '" + text + "' (expected male or female)");
}

std::string to_string(Gender g) { return g == Gender::male ? "male" : "female"; }

void Anthropometry::validate() const {
  if (!(std::isfinite(stature_m) && stature_m > 0.0))
    throw DomainError("stature must be positive, got " + std::to_string(stature_m) + " m");
  if (!(std::isfinite(body_weight_kg) && body_weight_kg > 0.0))
    throw DomainError("body weight must be positive, got " + std::to_string(body_weight_kg) + " kg");
  if (!(strength_percentile > 0.0 && strength_percentile < 100.0))
    throw DomainError("strength percentile must lie strictly between 0 and 100");
}

namespace {

SegmentShape parse_shape(const std::string& s) {
  if (s == "cylinder") return SegmentShape::cylinder;
  if (s == "ball") return SegmentShape::ball;
  if (s == "cube") return SegmentShape::cube;
  throw ConfigError("unknown segment shape '" + s + "'");
}

LengthSpec parse_length(const nlohmann::json& j, bool supplementary) {
  LengthSpec spec;
  spec.symbol = j.at("symbol").get<std::string>();
  spec.name = j.at("segment").get<std::string>();
  spec.proportion = j.at("proportion").get<double>();
  if (j.contains("aliases")) spec.aliases = j.at("aliases").get<std::vector<std::string>>();
  spec.supplementary = supplementary;
  return spec;
}

}  // namespace

AnthropometryTable AnthropometryTable::load(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  AnthropometryTable table;
  try {
    if (doc.at("schema_version").get<int>() != 1) throw ConfigError(path.string() + ": unsupported schema_version");
    const auto& lengths = doc.at("lengths");
    for (const auto& row : lengths.at("segments")) table.lengths.push_back(parse_length(row, false));
    if (lengths.contains("supplementary"))
      for (const auto& row : lengths.at("supplementary").at("segments")) table.lengths.push_back(parse_length(row, true));

    for (const auto& g : doc.at("masses").at("groups")) {
      MassGroupSpec group;
      group.group = g.at("group").get<std::string>();
      group.percent_of_body = g.at("percent_of_body").get<double>();
      group.count = g.value("count", 1);
      if (group.count != 1 && group.count != 2) throw ConfigError("group '" + group.group + "': count must be 1 or 2");
      for (const auto& s : g.at("segments")) {
        MassSegmentSpec seg;
        seg.name = s.at("name").get<std::string>();
        seg.percent_of_group = s.at("percent_of_group").get<double>();
        seg.shape = parse_shape(s.at("shape").get<std::string>());
        seg.length_symbol = s.at("length").get<std::string>();
        seg.width_symbol = s.value("width", std::string{});
        if (seg.shape == SegmentShape::cube && seg.width_symbol.empty())
          throw ConfigError("cube segment '" + seg.name + "' needs a width symbol");
        group.segments.push_back(std::move(seg));
      }
      table.groups.push_back(std::move(group));
    }
    if (doc.contains("shape_defaults")) {
      const auto& d = doc.at("shape_defaults");
      table.cylinder_radius_ratio = d.value("cylinder_radius_ratio", table.cylinder_radius_ratio);
      table.cube_depth_ratio = d.value("cube_depth_ratio", table.cube_depth_ratio);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return table;
}

AnthropometryTable AnthropometryTable::bundled() { return load(data_directory() / "anthropometry.json"); }

std::vector<SegmentGeometry> scale_segments(const AnthropometryTable& table, const Anthropometry& anthro) {
  anthro.validate();
  std::vector<SegmentGeometry> out;
  out.reserve(table.lengths.size());
  for (const auto& spec : table.lengths) {
    out.push_back({spec.symbol, spec.name, spec.proportion, spec.proportion * anthro.stature_m, spec.supplementary,
                   spec.aliases});
  }
  return out;
}

std::map<std::string, double, std::less<>> length_symbols(const std::vector<SegmentGeometry>& geometry) {
  std::map<std::string, double, std::less<>> symbols;
  for (const auto& g : geometry) {
    symbols[g.symbol] = g.length_m;
    for (const auto& alias : g.aliases) symbols[alias] = g.length_m;
  }
  return symbols;
}

Eigen::Vector3d cylinder_inertia(double mass, double length, double radius) {
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  return {transverse, transverse, 0.5 * mass * radius * radius};
}

Eigen::Vector3d ball_inertia(double mass, double radius) {
  const double i = 0.4 * mass * radius * radius;
  return {i, i, i};
}

Eigen::Vector3d cuboid_inertia(double mass, double width, double depth, double length) {
  return {mass * (depth * depth + length * length) / 12.0, mass * (width * width + length * length) / 12.0,
          mass * (width * width + depth * depth) / 12.0};
}

std::vector<SegmentDynamics> distribute_masses(const AnthropometryTable& table, const Anthropometry& anthro) {
  anthro.validate();
  const auto symbols = length_symbols(scale_segments(table, anthro));
  auto length_of = [&](const std::string& symbol) {
    auto it = symbols.find(symbol);
    if (it == symbols.end()) throw ConfigError("segment length symbol '" + symbol + "' is not defined");
    return it->second;
  };

  std::vector<SegmentDynamics> out;
  for (const auto& group : table.groups) {
    const double group_mass = group.percent_of_body / 100.0 * anthro.body_weight_kg;
    const std::vector<std::string> prefixes = group.count == 2 ? std::vector<std::string>{"l_", "r_"}
                                                               : std::vector<std::string>{""};
    for (const auto& prefix : prefixes) {
      for (const auto& seg : group.segments) {
        SegmentDynamics d;
        d.name = prefix + seg.name;
        d.group = group.group;
        d.shape = seg.shape;
        d.mass_kg = seg.percent_of_group / 100.0 * group_mass;
        d.length_m = length_of(seg.length_symbol);
        switch (seg.shape) {
          case SegmentShape::cylinder:
            d.com_offset_m = 0.5 * d.length_m;
            d.inertia_about_com = cylinder_inertia(d.mass_kg, d.length_m, table.cylinder_radius_ratio * d.length_m);
            break;
          case SegmentShape::ball:
            d.com_offset_m = 0.5 * d.length_m;
            d.inertia_about_com = ball_inertia(d.mass_kg, 0.5 * d.length_m);
            break;
          case SegmentShape::cube: {
            const double width = length_of(seg.width_symbol);
            d.com_offset_m = 0.5 * d.length_m;
            d.inertia_about_com = cuboid_inertia(d.mass_kg, width, table.cube_depth_ratio * width, d.length_m);
            break;
          }
        }
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace vhs
