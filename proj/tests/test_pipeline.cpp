#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fcso/pipeline.hpp"
#include "fcso/shapes.hpp"
#include "fcso/stl_io.hpp"
#include "fcso/surface_extract.hpp"

using namespace fcso;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ellipsoid clipped flat at the bottom and the top, so it rests two ways
TriMesh flat_bottom_blob() {
  const GridSpec spec(RigidTransform::translate(Vec3(-13, -11, 0)), Vec3(26, 22, 12.5), 0.5);
  OccupancyGrid g(spec);
  const Vec3 center(0, 0, 6), semi(12, 10, 8);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 d = (spec.cell_center_world(i, j, k) - center).cwiseQuotient(semi);
        if (d.squaredNorm() <= 1.0) g.set(i, j, k, true);
      }
  return extract_surface(g);
}

// small block with a vertical groove on one face
TriMesh grooved_block() {
  const GridSpec spec(RigidTransform::translate(Vec3(-15, -12, 0)), Vec3(30, 24, 16), 0.5);
  OccupancyGrid g(spec);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 c = spec.cell_center_world(i, j, k);
        const bool groove = c.y() > 9.0 && c.x() > -4.0 && c.x() < 4.0;
        g.set(i, j, k, !groove);
      }
  return extract_surface(g);
}

struct Fixture {
  fs::path dir;
  fs::path config_path;

  explicit Fixture(const std::string& name) {
    dir = fs::temp_directory_path() / ("fcso_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);

    save_stl_file(grooved_block(), (dir / "block.stl").string());
    save_stl_file(flat_bottom_blob(), (dir / "blob.stl").string());
    save_stl_file(make_flat_finger(20, 16, 8), (dir / "finger.stl").string());
  }

  std::string base_config(const std::string& out_dir) const {
    std::ostringstream cfg;
    cfg << "object.1.path = " << (dir / "block.stl").string() << "\n"
        << "object.2.path = " << (dir / "blob.stl").string() << "\n"
        << "poses.count = 1\n"
        << "poses.mode = random\n"
        << "poses.seed = 3\n"
        << "sample.L = 16\nsample.W = 12\nsample.T = 5\nsample.D = 4\nsample.stride = 8\n"
        << "gripper.max_opening = 50\n"
        << "gripper.finger_stl = " << (dir / "finger.stl").string() << "\n"
        << "gripper.body_box = 30, 60, 40\n"
        << "feasibility.min_contact_volume = 20\n"
        << "feasibility.min_contact_footprint = 10\n"
        << "voxel.h = 0.5\n"
        << "limits.max_candidates_per_pose = 2\n"
        << "output.dir = " << (dir / out_dir).string() << "\n";
    return cfg.str();
  }

  ~Fixture() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("config parsing covers the documented keys") {
  const std::string text =
      "# comment\n"
      "object.1.path = a.stl\n"
      "object.1.scale = 25.4\n"
      "poses.count = 2\n"
      "poses.mode = manual\n"
      "poses.indices = 1, 3\n"
      "sample.L = 20\nsample.W = 20\nsample.T = 5\nsample.D = 4\nsample.stride = 4\n"
      "gripper.max_opening = 50\n"
      "gripper.finger_stl = finger.stl\n"
      "filter.th = 0.1\nfilter.K = 1.5\n"
      "voxel.h = 0.25\n"
      "output.fusion_mode = remesh\n"
      "output.per_combination_pads = true\n";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.objects.size() == 1);
  CHECK(cfg.objects[0].unit_scale == 25.4);
  CHECK(cfg.poses.mode == PoseSelectionMode::manual);
  CHECK(cfg.poses.indices == std::vector<int>{1, 3});
  CHECK(cfg.sample.penetration == 4.0);
  CHECK(cfg.output.fusion_mode == FusionMode::remesh);
  CHECK(cfg.output.per_combination_pads);

  CHECK_THROWS_WITH_AS(parse_config("no_such.key = 1\n"), doctest::Contains("unknown key"),
                       std::runtime_error);
  CHECK_THROWS_AS(parse_config("sample.L 20\n"), std::runtime_error);
}

TEST_CASE("validation reports every violation with its key path") {
  RunConfig cfg;  // no objects, no finger
  cfg.sample.penetration = 7.0;  // D > T
  cfg.filter.volume_ratio_threshold = 1.5;
  const auto violations = validate(cfg);

  auto has = [&](const std::string& needle) {
    for (const auto& v : violations)
      if (v.find(needle) != std::string::npos) return true;
    return false;
  };
  CHECK(violations.size() >= 4);
  CHECK(has("object.*"));
  CHECK(has("sample.D"));
  CHECK(has("filter.th: out of (0,1)"));
  CHECK(has("gripper.finger_stl"));
}

TEST_CASE("a config with D >= T fails before any geometry work") {
  Fixture fx("dt");
  RunConfig cfg = parse_config(fx.base_config("out"));
  cfg.sample.penetration = 5.0;  // == T
  CHECK_THROWS_AS(run_pipeline(cfg), ConfigValidationError);
}

TEST_CASE("missing object file is a validation error naming the path") {
  Fixture fx("missing");
  std::string text = fx.base_config("out");
  text += "object.3.path = /nonexistent/shape.stl\n";
  const auto violations = validate(parse_config(text));
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("/nonexistent/shape.stl") != std::string::npos);
}

TEST_CASE("mini end-to-end run: two objects, one pose each") {
  Fixture fx("run");
  const RunConfig cfg = parse_config(fx.base_config("out"));
  REQUIRE(validate(cfg).empty());
  const RunReport report = run_pipeline(cfg);

  REQUIRE(report.valid_pairs.size() == 2);
  long long c = 1;
  for (int n : report.valid_pairs) {
    CHECK(n >= 1);
    c *= n;
  }
  CHECK(report.combination_count == c);
  CHECK(report.enumerated == c);

  // exactly one best row in the report
  const std::string report_text = slurp(report.report_csv);
  std::size_t best_rows = 0, pos = 0;
  while ((pos = report_text.find(",1\n", pos)) != std::string::npos) {
    ++best_rows;
    pos += 3;
  }
  CHECK(best_rows == 1);

  CHECK(fs::exists(report.finger_stl));
  CHECK(fs::exists(report.pad_stl));
  CHECK(signed_volume(load_stl_file(report.finger_stl.string())) > 0.0);

  // no-penetration: the chosen pad keeps out of every object's intersection
  REQUIRE(report.best_candidates.size() == 2);
  const TriMesh pad = load_stl_file(report.pad_stl.string());
  const GridSpec canonical(RigidTransform::identity(),
                           Vec3(cfg.sample.length, cfg.sample.width, cfg.sample.thickness),
                           cfg.voxel_h);
  const OccupancyGrid pad_grid = voxelize(pad, canonical);
  const double layer_volume =
      cfg.sample.length * cfg.sample.width * cfg.voxel_h;
  for (std::size_t p = 0; p < report.best_candidates.size(); ++p) {
    for (int side = 0; side < 2; ++side) {
      const OccupancyGrid object_in_box =
          voxelize(report.posed_objects[p], report.best_candidates[p].side_frames[side])
              .rebased(RigidTransform::identity());
      const OccupancyGrid overlap = grid_bool(pad_grid, object_in_box, BoolOp::intersect);
      CHECK(grid_volume(overlap) <= 3.0 * layer_volume);
    }
  }
}

TEST_CASE("two identical runs produce byte-identical reports") {
  Fixture fx("repro");
  const RunConfig cfg_a = parse_config(fx.base_config("out_a"));
  const RunConfig cfg_b = parse_config(fx.base_config("out_b"));
  const RunReport a = run_pipeline(cfg_a);
  const RunReport b = run_pipeline(cfg_b);
  CHECK(slurp(a.report_csv) == slurp(b.report_csv));
  CHECK(slurp(a.records_csv) == slurp(b.records_csv));
  CHECK(slurp(a.finger_stl) == slurp(b.finger_stl));
}

TEST_CASE("skipping the quality stage still emits identical pads") {
  Fixture fx("isolation");
  RunConfig full = parse_config(fx.base_config("out_full") +
                                "output.per_combination_pads = true\n");
  RunConfig skip = parse_config(fx.base_config("out_skip"));
  skip.skip_quality = true;

  const RunReport full_report = run_pipeline(full);
  const RunReport skip_report = run_pipeline(skip);
  CHECK(skip_report.selection.combination_ids.empty());

  for (int i = 1; i <= full_report.enumerated; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "pad_%04d.stl", i);
    const fs::path a = fs::path(full.output.dir) / name;
    const fs::path b = fs::path(skip.output.dir) / name;
    REQUIRE(fs::exists(a));
    REQUIRE(fs::exists(b));
    CHECK(slurp(a) == slurp(b));
  }
}

TEST_CASE("one finger serves two objects at two poses each: eight geometries") {
  Fixture fx("eight");
  std::string text = fx.base_config("out");
  text += "poses.count = 2\nlimits.max_candidates_per_pose = 1\n";
  const RunConfig cfg = parse_config(text);
  const RunReport report = run_pipeline(cfg);

  REQUIRE(report.valid_pairs == std::vector<int>{1, 1, 1, 1});
  CHECK(report.combination_count == 1);
  REQUIRE(report.best_candidates.size() == 4);

  // the single pad was synthesized from 2 objects x 2 poses x 2 sides
  const std::string records = slurp(report.records_csv);
  CHECK(std::count(records.begin(), records.end(), '\n') == 1 + 8);

  // and it stays out of every one of the eight intersections
  const TriMesh pad = load_stl_file(report.pad_stl.string());
  const GridSpec canonical(RigidTransform::identity(),
                           Vec3(cfg.sample.length, cfg.sample.width, cfg.sample.thickness),
                           cfg.voxel_h);
  const OccupancyGrid pad_grid = voxelize(pad, canonical);
  const double layer_volume = cfg.sample.length * cfg.sample.width * cfg.voxel_h;
  for (std::size_t p = 0; p < report.best_candidates.size(); ++p)
    for (int side = 0; side < 2; ++side) {
      const OccupancyGrid object_in_box =
          voxelize(report.posed_objects[p], report.best_candidates[p].side_frames[side])
              .rebased(RigidTransform::identity());
      CHECK(grid_volume(grid_bool(pad_grid, object_in_box, BoolOp::intersect)) <=
            3.0 * layer_volume);
    }
}

TEST_CASE("a pose without any feasible grasp aborts with the pose named") {
  Fixture fx("nograsp");
  // contact thresholds no object this small can meet
  std::string text = fx.base_config("out");
  text += "feasibility.min_contact_volume = 1e7\n";
  const RunConfig cfg = parse_config(text);
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("pose 1"), NoFeasibleGraspError);
}

TEST_CASE("combination cap truncates the enumeration with a warning") {
  Fixture fx("cap");
  std::string text = fx.base_config("out");
  text += "poses.mode = manual\nposes.indices = 0\nlimits.max_combinations = 2\n";
  RunConfig cfg = parse_config(text);
  cfg.poses.count = 1;
  const RunReport report = run_pipeline(cfg);

  CHECK(report.combination_count == 4);
  CHECK(report.capped);
  CHECK(report.enumerated == 2);
  CHECK(report.selection.combination_ids == std::vector<int>{1, 2});

  const std::string report_text = slurp(report.report_csv);
  CHECK(std::count(report_text.begin(), report_text.end(), '\n') == 1 + 2);
}

TEST_CASE("score command math on a minimal CSV") {
  const std::string csv =
      "combination,pose,rles,area\n"
      "1,1,0.5,100\n"
      "1,2,0.4,40\n"
      "2,1,1.0,400\n"
      "2,2,0.8,100\n";
  const ScoreResult result = score_records_csv(csv);
  REQUIRE(result.selection.combination_ids == std::vector<int>{1, 2});
  CHECK(result.selection.quality[0] == doctest::Approx(100.0));   // min(200, 100)
  CHECK(result.selection.quality[1] == doctest::Approx(125.0));   // min(400, 125)
  CHECK(result.selection.best_combination == 2);
  CHECK(result.report_csv.find("is_best") != std::string::npos);
}
