#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fcso/config.hpp"
#include "fcso/grasp_quality.hpp"
#include "fcso/pad_synth.hpp"
#include "fcso/stable_pose.hpp"

namespace fcso {

struct ConfigValidationError : std::runtime_error {
  explicit ConfigValidationError(std::vector<std::string> violations_);
  std::vector<std::string> violations;
};

struct NoFeasibleGraspError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageTimings {
  double poses = 0.0, sampling = 0.0, synthesis = 0.0, quality = 0.0, output = 0.0;
};

struct RunReport {
  std::vector<int> valid_pairs;     // N_{s,m}, global pose order
  std::vector<int> pose_ids;        // 1-based m
  long long combination_count = 0;  // C = product of N_{s,m}
  int enumerated = 0;               // combinations actually evaluated (cap applies)
  bool capped = false;
  std::vector<QualityRecord> quality_records;
  SelectionResult selection;        // empty when the quality stage is skipped
  std::vector<TriMesh> posed_objects;        // one per global pose
  std::vector<GraspCandidate> best_candidates;  // per pose, for the winner
  StageTimings timings;
  std::filesystem::path report_csv, records_csv, finger_stl, pad_stl;
};

/// Full run: poses -> grasp sampling -> pad synthesis -> quality -> best
/// finger. Writes report.csv, records.csv, pad_only.stl and finger_best.stl
/// into config.output.dir (plus pad_NNNN.stl per combination on request).
/// Deterministic for a fixed config and seed.
RunReport run_pipeline(const RunConfig& config);

/// Selection math alone: rows of (combination, pose, RLES, A), header
/// optional. Returns the report CSV text that `run_pipeline` would write
/// for these records.
struct ScoreResult {
  std::vector<QualityRecord> records;
  SelectionResult selection;
  std::string report_csv;
};
ScoreResult score_records_csv(const std::string& csv_text);

}  // namespace fcso
