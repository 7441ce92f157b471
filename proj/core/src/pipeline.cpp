#include "fcso/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "fcso/finger_design.hpp"
#include "fcso/parallel.hpp"
#include "fcso/stl_io.hpp"
#include "fcso/surface_extract.hpp"

namespace fcso {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const char* case_name(PadCase c) {
  switch (c) {
    case PadCase::all_good: return "all_good";
    case PadCase::all_bad: return "all_bad";
    case PadCase::mixed: return "mixed";
  }
  return "?";
}

std::string report_csv_text(const std::vector<QualityRecord>& records,
                            const SelectionResult& selection) {
  std::vector<int> poses;
  for (const auto& r : records)
    if (std::find(poses.begin(), poses.end(), r.pose) == poses.end()) poses.push_back(r.pose);
  std::sort(poses.begin(), poses.end());

  std::map<int, std::map<int, const QualityRecord*>> by_combo;
  for (const auto& r : records) by_combo[r.combination][r.pose] = &r;

  std::ostringstream out;
  std::vector<std::string> header{"i"};
  for (int m : poses) header.push_back("pose_" + std::to_string(m));
  for (int m : poses) header.push_back("rles_" + std::to_string(m));
  for (int m : poses) header.push_back("area_" + std::to_string(m));
  for (int m : poses) header.push_back("effective_" + std::to_string(m));
  header.push_back("quality");
  header.push_back("is_best");
  out << join(header, ",") << "\n";

  for (std::size_t idx = 0; idx < selection.combination_ids.size(); ++idx) {
    const int i = selection.combination_ids[idx];
    std::vector<std::string> row{std::to_string(i)};
    for (int m : poses) row.push_back(std::to_string(m));
    for (int m : poses) row.push_back(fmt(by_combo[i][m]->rles_value));
    for (int m : poses) row.push_back(fmt(by_combo[i][m]->contact_area));
    for (int m : poses) row.push_back(fmt(by_combo[i][m]->effective));
    row.push_back(fmt(selection.quality[idx]));
    row.push_back(i == selection.best_combination ? "1" : "0");
    out << join(row, ",") << "\n";
  }
  return out.str();
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations_)
    : std::runtime_error("config validation failed:\n  " + join(violations_, "\n  ")),
      violations(std::move(violations_)) {}

ScoreResult score_records_csv(const std::string& csv_text) {
  ScoreResult out;
  std::istringstream in(csv_text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4)
      throw std::runtime_error("score: line " + std::to_string(line_no) +
                               ": expected 'combination,pose,rles,area'");
    if (line_no == 1 && cells[0].find_first_not_of("0123456789 \t") != std::string::npos)
      continue;  // header row
    QualityRecord rec;
    rec.combination = std::stoi(cells[0]);
    rec.pose = std::stoi(cells[1]);
    rec.rles_value = std::stod(cells[2]);
    rec.contact_area = std::stod(cells[3]);
    rec.effective = effective_area(rec.rles_value, rec.contact_area);
    out.records.push_back(rec);
  }
  if (out.records.empty()) throw std::runtime_error("score: no records in input");
  out.selection = select_best(out.records);
  out.report_csv = report_csv_text(out.records, out.selection);
  return out;
}

RunReport run_pipeline(const RunConfig& config) {
  const std::vector<std::string> violations = validate(config);
  if (!violations.empty()) throw ConfigValidationError(violations);

  RunReport report;
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output.dir);
  fs::create_directories(out_dir);

  // ---- stage 1: stable poses -------------------------------------------
  auto t0 = std::chrono::steady_clock::now();
  struct PoseEntry {
    int pose_id;
    int object_index;
    TriMesh posed_mesh;
    std::vector<GraspCandidate> candidates;
  };
  std::vector<PoseEntry> poses;
  {
    int next_pose_id = 1;
    for (std::size_t obj_idx = 0; obj_idx < config.objects.size(); ++obj_idx) {
      const auto& obj = config.objects[obj_idx];
      const TriMesh mesh = load_stl_file(obj.path, obj.unit_scale);
      const auto enumerated = enumerate_stable_poses(mesh);
      PoseSelectionMode mode;
      if (config.poses.mode == PoseSelectionMode::manual) {
        mode = PoseSelectionMode::manual_indices(config.poses.indices);
      } else {
        mode = PoseSelectionMode::random_seeded(config.poses.seed +
                                                static_cast<std::uint64_t>(obj_idx));
      }
      const PoseSelection selection = select_poses(enumerated, config.poses.count, mode);
      for (const auto& pose : selection.poses) {
        PoseEntry entry;
        entry.pose_id = next_pose_id++;
        entry.object_index = static_cast<int>(obj_idx);
        entry.posed_mesh = apply_transform(mesh, pose.transform);
        poses.push_back(std::move(entry));
      }
    }
  }
  report.timings.poses = seconds_since(t0);

  // ---- stage 2: grasp sampling ------------------------------------------
  t0 = std::chrono::steady_clock::now();
  SamplerParams sampler_params;
  sampler_params.voxel_h = config.voxel_h;
  sampler_params.max_candidates_per_pose = config.max_candidates_per_pose;
  for (auto& entry : poses) {
    entry.candidates =
        sample_grasps(entry.posed_mesh, config.sample, config.gripper, sampler_params);
    for (auto& c : entry.candidates) c.pose_id = entry.pose_id;
    if (entry.candidates.empty())
      throw NoFeasibleGraspError("pose " + std::to_string(entry.pose_id) + " (object " +
                                 std::to_string(entry.object_index + 1) +
                                 ") has no feasible grasp");
    report.valid_pairs.push_back(static_cast<int>(entry.candidates.size()));
    report.pose_ids.push_back(entry.pose_id);
  }
  report.combination_count = count_combinations(report.valid_pairs);
  report.timings.sampling = seconds_since(t0);

  // ---- stage 3: geometry records (shared across combinations) -----------
  t0 = std::chrono::steady_clock::now();
  const int n_poses = static_cast<int>(poses.size());
  std::vector<std::vector<std::array<GeometryRecord, 2>>> records(poses.size());
  {
    std::vector<std::pair<int, int>> jobs;  // (pose index, candidate index)
    for (int p = 0; p < n_poses; ++p) {
      records[p].resize(poses[p].candidates.size());
      for (std::size_t c = 0; c < poses[p].candidates.size(); ++c)
        jobs.emplace_back(p, static_cast<int>(c));
    }
    parallel_for(0, static_cast<int>(jobs.size()), [&](int j) {
      const auto [p, c] = jobs[static_cast<std::size_t>(j)];
      const GraspCandidate& cand = poses[p].candidates[static_cast<std::size_t>(c)];
      for (int side = 0; side < 2; ++side) {
        GeometryRecord rec = extract_intersection(poses[p].posed_mesh, cand.side_frames[side]);
        rec.depth_of_interest = depth_of_interest(rec.grid, config.sample.penetration);
        classify_geometry(rec, config.filter, config.sample.penetration);
        rec.pose_id = cand.pose_id;
        rec.candidate_index = c;
        rec.side = side;
        records[p][static_cast<std::size_t>(c)][side] = std::move(rec);
      }
    });
  }

  // ---- stage 4: combinations, pads, quality ------------------------------
  const long long cap = config.max_combinations;
  report.capped = report.combination_count > cap;
  if (report.capped)
    std::cerr << "warning: " << report.combination_count
              << " combinations exceed limits.max_combinations=" << cap
              << ", evaluating the first " << cap << " in lexicographic order\n";
  report.enumerated = static_cast<int>(std::min(report.combination_count, cap));

  std::vector<TriangleBvh> object_bvh;
  object_bvh.reserve(poses.size());
  for (const auto& entry : poses) object_bvh.emplace_back(entry.posed_mesh);

  const double epsilon = config.effective_epsilon();
  const bool emit_pads = config.output.per_combination_pads || config.skip_quality;

  struct ComboResult {
    std::vector<QualityRecord> quality;
    PadCase pad_case = PadCase::all_good;
    double block_depth = 0.0;
  };
  std::vector<ComboResult> combos(static_cast<std::size_t>(report.enumerated));
  auto decode = [&](long long index_0b) {
    std::vector<int> choice(poses.size());
    for (int p = n_poses - 1; p >= 0; --p) {
      const int radix = static_cast<int>(records[p].size());
      choice[p] = static_cast<int>(index_0b % radix);
      index_0b /= radix;
    }
    return choice;
  };
  auto records_for = [&](const std::vector<int>& choice) {
    std::vector<GeometryRecord> recs;
    recs.reserve(poses.size() * 2);
    for (int p = 0; p < n_poses; ++p)
      for (int side = 0; side < 2; ++side)
        recs.push_back(records[p][static_cast<std::size_t>(choice[p])][side]);
    return recs;
  };

  parallel_for(0, report.enumerated, [&](int idx) {
    const int combination_id = idx + 1;
    const std::vector<int> choice = decode(idx);
    const PadGeometry pad = synthesize_pad(records_for(choice), config.filter, config.sample);

    ComboResult result;
    result.pad_case = pad.pad_case;
    result.block_depth = pad.block_depth;

    if (emit_pads) {
      char name[64];
      std::snprintf(name, sizeof(name), "pad_%04d.stl", combination_id);
      save_stl_file(pad.mesh, (out_dir / name).string());
    }

    if (!config.skip_quality) {
      for (int p = 0; p < n_poses; ++p) {
        const GraspCandidate& cand = poses[p].candidates[static_cast<std::size_t>(choice[p])];
        const auto patches =
            extract_contact_pair(pad.mesh, cand.side_frames, object_bvh[p], epsilon);
        std::vector<Vec3> pooled;
        double area = 0.0;
        for (const auto& patch : patches) {
          pooled.insert(pooled.end(), patch.normals.begin(), patch.normals.end());
          area += patch.area;
        }
        QualityRecord q;
        q.combination = combination_id;
        q.pose = poses[p].pose_id;
        q.contact_area = area;
        q.rles_value = pooled.empty() ? 2.0 : rles(pooled);
        q.effective = effective_area(q.rles_value, q.contact_area);
        result.quality.push_back(q);
      }
    }
    combos[static_cast<std::size_t>(idx)] = std::move(result);
  });
  report.timings.synthesis = seconds_since(t0);

  // ---- stage 5: selection and artifacts ----------------------------------
  t0 = std::chrono::steady_clock::now();

  // per-record filter CSV in canonical order
  {
    std::ostringstream csv;
    csv << "combination,pose,side,V_I,V_B,R,d_n,label,case\n";
    for (int idx = 0; idx < report.enumerated; ++idx) {
      const std::vector<int> choice = decode(idx);
      for (int p = 0; p < n_poses; ++p)
        for (int side = 0; side < 2; ++side) {
          const GeometryRecord& r = records[p][static_cast<std::size_t>(choice[p])][side];
          csv << (idx + 1) << ',' << poses[p].pose_id << ',' << side << ','
              << fmt(r.intersection_volume) << ',' << fmt(r.bounding_volume) << ','
              << fmt(r.volume_ratio) << ',' << fmt(r.depth_of_interest) << ','
              << (r.label == GeometryLabel::good ? "good" : "bad") << ','
              << case_name(combos[static_cast<std::size_t>(idx)].pad_case) << '\n';
        }
    }
    report.records_csv = out_dir / "records.csv";
    std::ofstream f(report.records_csv, std::ios::trunc);
    f << csv.str();
  }

  if (!config.skip_quality) {
    for (const auto& combo : combos)
      report.quality_records.insert(report.quality_records.end(), combo.quality.begin(),
                                    combo.quality.end());
    report.selection = select_best(report.quality_records);

    report.report_csv = out_dir / "report.csv";
    {
      std::ofstream f(report.report_csv, std::ios::trunc);
      f << report_csv_text(report.quality_records, report.selection);
    }

    // rebuild the winning pad and fuse it onto the flat finger
    const int best_idx = report.selection.best_combination - 1;
    const std::vector<int> best_choice = decode(best_idx);
    for (int p = 0; p < n_poses; ++p)
      report.best_candidates.push_back(
          poses[p].candidates[static_cast<std::size_t>(best_choice[p])]);
    const PadGeometry best_pad =
        synthesize_pad(records_for(best_choice), config.filter, config.sample);
    report.pad_stl = out_dir / "pad_only.stl";
    save_stl_file(best_pad.mesh, report.pad_stl.string());

    const TriMesh finger = load_stl_file(config.finger_stl);
    const FingerAssembly assembly = assemble_finger(finger, best_pad.mesh, config.sample,
                                                    config.output.fusion_mode, config.voxel_h);
    report.finger_stl = out_dir / "finger_best.stl";
    save_stl_file(assembly.fused, report.finger_stl.string());
  }
  report.timings.output = seconds_since(t0);

  for (auto& entry : poses) report.posed_objects.push_back(std::move(entry.posed_mesh));

  std::cout << "poses: " << poses.size() << " (";
  for (std::size_t i = 0; i < report.valid_pairs.size(); ++i)
    std::cout << (i ? ", " : "") << "N_s," << report.pose_ids[i] << "=" << report.valid_pairs[i];
  std::cout << ")\ncombinations: " << report.combination_count;
  if (report.capped) std::cout << " (evaluated " << report.enumerated << ")";
  std::cout << "\n";
  if (!config.skip_quality)
    std::cout << "best combination: " << report.selection.best_combination
              << " (Q_max=" << fmt(report.selection.best_quality) << ")\n";
  std::cout << "timings [s]: poses=" << fmt(report.timings.poses)
            << " sampling=" << fmt(report.timings.sampling)
            << " synthesis+quality=" << fmt(report.timings.synthesis)
            << " output=" << fmt(report.timings.output) << "\n";
  return report;
}

}  // namespace fcso
