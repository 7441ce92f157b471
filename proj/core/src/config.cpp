#include "fcso/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fcso {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(trim(part));
  return parts;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: " + key + ": expected a number, got '" + value + "'");
  }
}

long long to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: " + key + ": expected an integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::runtime_error("config: " + key + ": expected true/false, got '" + value + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<int, ObjectSpec> objects;  // by 1-based index

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key.rfind("object.", 0) == 0) {
      const auto rest = key.substr(7);
      const auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw std::runtime_error("config: " + key + ": expected object.<n>.path or object.<n>.scale");
      const int idx = static_cast<int>(to_int(key, rest.substr(0, dot)));
      const std::string field = rest.substr(dot + 1);
      if (field == "path")
        objects[idx].path = value;
      else if (field == "scale")
        objects[idx].unit_scale = to_double(key, value);
      else
        throw std::runtime_error("config: unknown object field '" + field + "'");
    } else if (key == "poses.count") {
      cfg.poses.count = static_cast<int>(to_int(key, value));
    } else if (key == "poses.mode") {
      if (value == "random")
        cfg.poses.mode = PoseSelectionMode::random;
      else if (value == "manual")
        cfg.poses.mode = PoseSelectionMode::manual;
      else
        throw std::runtime_error("config: poses.mode must be random or manual, got '" + value + "'");
    } else if (key == "poses.seed") {
      cfg.poses.seed = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "poses.indices") {
      cfg.poses.indices.clear();
      for (const auto& p : split_commas(value))
        cfg.poses.indices.push_back(static_cast<int>(to_int(key, p)));
    } else if (key == "sample.L") {
      cfg.sample.length = to_double(key, value);
    } else if (key == "sample.W") {
      cfg.sample.width = to_double(key, value);
    } else if (key == "sample.T") {
      cfg.sample.thickness = to_double(key, value);
    } else if (key == "sample.D") {
      cfg.sample.penetration = to_double(key, value);
    } else if (key == "sample.stride") {
      cfg.sample.stride = to_double(key, value);
    } else if (key == "gripper.max_opening") {
      cfg.gripper.max_opening = to_double(key, value);
    } else if (key == "gripper.finger_stl") {
      cfg.finger_stl = value;
    } else if (key == "gripper.body_box") {
      const auto parts = split_commas(value);
      if (parts.size() != 3)
        throw std::runtime_error("config: gripper.body_box needs three comma-separated extents");
      for (int k = 0; k < 3; ++k) cfg.gripper.body_clearance_box[k] = to_double(key, parts[k]);
    } else if (key == "feasibility.min_contact_volume") {
      cfg.gripper.min_contact_volume = to_double(key, value);
    } else if (key == "feasibility.min_contact_footprint") {
      cfg.gripper.min_contact_footprint = to_double(key, value);
    } else if (key == "filter.th") {
      cfg.filter.volume_ratio_threshold = to_double(key, value);
    } else if (key == "filter.K") {
      cfg.filter.flatness_gain = to_double(key, value);
    } else if (key == "filter.cluster_tol_deg") {
      cfg.filter.cluster_tol_deg = to_double(key, value);
    } else if (key == "filter.perp_tol_deg") {
      cfg.filter.perp_tol_deg = to_double(key, value);
    } else if (key == "voxel.h") {
      cfg.voxel_h = to_double(key, value);
    } else if (key == "quality.epsilon") {
      cfg.contact_epsilon = to_double(key, value);
    } else if (key == "output.dir") {
      cfg.output.dir = value;
    } else if (key == "output.fusion_mode") {
      if (value == "shell")
        cfg.output.fusion_mode = FusionMode::shell;
      else if (value == "remesh")
        cfg.output.fusion_mode = FusionMode::remesh;
      else
        throw std::runtime_error("config: output.fusion_mode must be shell or remesh");
    } else if (key == "output.per_combination_pads") {
      cfg.output.per_combination_pads = to_bool(key, value);
    } else if (key == "limits.max_combinations") {
      cfg.max_combinations = to_int(key, value);
    } else if (key == "limits.max_candidates_per_pose") {
      cfg.max_candidates_per_pose = static_cast<int>(to_int(key, value));
    } else {
      throw std::runtime_error("config: line " + std::to_string(line_no) + ": unknown key '" +
                               key + "'");
    }
  }

  for (const auto& [idx, obj] : objects) {
    (void)idx;
    cfg.objects.push_back(obj);
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> violations;
  auto bad = [&](const std::string& key, const std::string& what) {
    violations.push_back(key + ": " + what);
  };

  if (cfg.objects.empty()) bad("object.*", "at least one object STL is required");
  for (std::size_t i = 0; i < cfg.objects.size(); ++i) {
    const auto& obj = cfg.objects[i];
    const std::string key = "object." + std::to_string(i + 1);
    if (obj.path.empty())
      bad(key + ".path", "missing path");
    else if (!std::filesystem::exists(obj.path))
      bad(key + ".path", "file not found: " + obj.path);
    if (!(obj.unit_scale > 0.0)) bad(key + ".scale", "must be positive");
  }

  if (cfg.poses.count < 1) bad("poses.count", "must be at least 1");
  if (cfg.poses.mode == PoseSelectionMode::manual &&
      static_cast<int>(cfg.poses.indices.size()) != cfg.poses.count)
    bad("poses.indices", "manual mode needs exactly poses.count indices");

  if (!(cfg.sample.length > 0.0)) bad("sample.L", "must be positive");
  if (!(cfg.sample.width > 0.0)) bad("sample.W", "must be positive");
  if (!(cfg.sample.thickness > 0.0)) bad("sample.T", "must be positive");
  if (!(cfg.sample.penetration > 0.0 && cfg.sample.penetration < cfg.sample.thickness))
    bad("sample.D", "penetration depth must satisfy 0 < D < T");
  else if (cfg.sample.thickness - cfg.sample.penetration < 0.5)
    bad("sample.D", "residual pad thickness T - D must be at least 0.5 mm");
  if (!(cfg.sample.stride > 0.0)) bad("sample.stride", "must be positive");

  if (!(cfg.gripper.max_opening > 0.0)) bad("gripper.max_opening", "must be positive");
  if (cfg.finger_stl.empty())
    bad("gripper.finger_stl", "missing path");
  else if (!std::filesystem::exists(cfg.finger_stl))
    bad("gripper.finger_stl", "file not found: " + cfg.finger_stl);
  if (!(cfg.gripper.body_clearance_box.array() > 0.0).all())
    bad("gripper.body_box", "extents must be positive");
  if (cfg.gripper.min_contact_volume < 0.0) bad("feasibility.min_contact_volume", "must be >= 0");
  if (cfg.gripper.min_contact_footprint < 0.0)
    bad("feasibility.min_contact_footprint", "must be >= 0");

  if (!(cfg.filter.volume_ratio_threshold > 0.0 && cfg.filter.volume_ratio_threshold < 1.0))
    bad("filter.th", "out of (0,1)");
  if (!(cfg.filter.flatness_gain >= 1.0)) bad("filter.K", "must be >= 1");
  if (!(cfg.filter.cluster_tol_deg > 0.0)) bad("filter.cluster_tol_deg", "must be positive");
  if (!(cfg.filter.perp_tol_deg > 0.0)) bad("filter.perp_tol_deg", "must be positive");

  if (!(cfg.voxel_h > 0.0)) bad("voxel.h", "must be positive");
  if (cfg.contact_epsilon == 0.0) bad("quality.epsilon", "must be positive");
  if (cfg.max_combinations < 1) bad("limits.max_combinations", "must be at least 1");
  if (cfg.max_candidates_per_pose < 1) bad("limits.max_candidates_per_pose", "must be at least 1");
  if (cfg.output.dir.empty()) bad("output.dir", "missing directory");

  return violations;
}

}  // namespace fcso
