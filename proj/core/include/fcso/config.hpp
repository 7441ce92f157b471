#pragma once

#include <string>
#include <vector>

#include "fcso/finger_design.hpp"
#include "fcso/grasp_sampler.hpp"
#include "fcso/pad_synth.hpp"
#include "fcso/stable_pose.hpp"

namespace fcso {

struct ObjectSpec {
  std::string path;
  double unit_scale = 1.0;
};

struct PoseSettings {
  int count = 2;                    // N_p per object
  PoseSelectionMode::Kind mode = PoseSelectionMode::random;
  std::uint64_t seed = 0;
  std::vector<int> indices;         // manual mode, 0-based
};

struct OutputSettings {
  std::string dir = "fcso_out";
  FusionMode fusion_mode = FusionMode::shell;
  bool per_combination_pads = false;
};

struct RunConfig {
  std::vector<ObjectSpec> objects;
  PoseSettings poses;
  SampleBoxSpec sample;
  GripperSpec gripper;          // numeric fields; the finger mesh loads at run time
  std::string finger_stl;
  FilterParams filter;
  double voxel_h = 0.25;
  double contact_epsilon = -1.0;  // < 0 means the default of two voxels
  OutputSettings output;
  long long max_combinations = 4096;
  int max_candidates_per_pose = 64;
  bool skip_quality = false;      // debug: stop after emitting pads

  double effective_epsilon() const { return contact_epsilon > 0.0 ? contact_epsilon : 2.0 * voxel_h; }
};

/// Parse the flat `key = value` grammar ('#' comments, dotted keys,
/// comma-separated tuples). Throws std::runtime_error naming the line on
/// syntax errors or unknown keys.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Every violation, each prefixed with the offending key path. Empty means
/// the config is runnable.
std::vector<std::string> validate(const RunConfig& config);

}  // namespace fcso
