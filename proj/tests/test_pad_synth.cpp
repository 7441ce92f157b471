#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fcso/pad_synth.hpp"
#include "fcso/shapes.hpp"
#include "fcso/surface_extract.hpp"

using namespace fcso;

namespace {

constexpr double kH = 0.25;
constexpr double kD = 4.0;  // tangent plane at w = T - D = 1

GridSpec finger_lattice() {
  return GridSpec(RigidTransform::identity(), Vec3(20, 20, 5), kH);
}

// object starts at the tangent plane and fills the box inward
OccupancyGrid flat_wall() {
  const GridSpec spec = finger_lattice();
  OccupancyGrid g(spec);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i)
        if (spec.cell_center_local(i, j, k).z() >= 1.0) g.set(i, j, k, true);
  return g;
}

// wall with a rectangular pocket sunk `depth` mm below the tangent plane
OccupancyGrid pocket_wall(double depth, double u0 = 5, double v0 = 5, double size = 10) {
  const GridSpec spec = finger_lattice();
  OccupancyGrid g(spec);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 c = spec.cell_center_local(i, j, k);
        if (c.z() < 1.0) continue;
        const bool in_pocket = c.x() > u0 && c.x() < u0 + size && c.y() > v0 &&
                               c.y() < v0 + size && c.z() < 1.0 + depth;
        g.set(i, j, k, !in_pocket);
      }
  return g;
}

// edge at 45 degrees spanning the whole box
OccupancyGrid slant() {
  const GridSpec spec = finger_lattice();
  OccupancyGrid g(spec);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 c = spec.cell_center_local(i, j, k);
        if (c.z() >= 1.0 + c.x()) g.set(i, j, k, true);
      }
  return g;
}

GeometryRecord make_record(OccupancyGrid grid, const FilterParams& params = {}) {
  GeometryRecord rec{std::move(grid)};
  rec.intersection_volume = grid_volume(rec.grid);
  const OccupiedBox ob = occupied_aabb(rec.grid);
  rec.bounding_volume = ob.volume;
  rec.volume_ratio = (ob.volume - rec.intersection_volume) / ob.volume;
  rec.depth_of_interest = depth_of_interest(rec.grid, kD);
  classify_geometry(rec, params, kD);
  return rec;
}

SampleBoxSpec box_spec() {
  SampleBoxSpec s;
  s.length = 20;
  s.width = 20;
  s.thickness = 5;
  s.penetration = 4;
  s.stride = 4;
  return s;
}

}  // namespace

TEST_CASE("extract_intersection of a flat wall: V_B = V_I, R = 0") {
  const TriMesh wall = make_box(Vec3(40, 40, 29), Vec3(-10, -10, 1));
  const GeometryRecord rec = extract_intersection(wall, finger_lattice());
  CHECK(rec.bounding_volume == doctest::Approx(1600.0).epsilon(1e-9));
  CHECK(rec.intersection_volume == doctest::Approx(1600.0).epsilon(1e-9));
  CHECK(rec.volume_ratio == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("extract_intersection of the pocket fixture: R = 0.1875") {
  // build the pocketed wall as a real watertight mesh and go through the
  // full mesh -> voxel route
  const TriMesh pocket_mesh = extract_surface(pocket_wall(3.0));
  REQUIRE(is_watertight(pocket_mesh));
  const GeometryRecord rec = extract_intersection(pocket_mesh, finger_lattice());
  CHECK(rec.bounding_volume == doctest::Approx(1600.0).epsilon(0.02));
  CHECK(rec.intersection_volume == doctest::Approx(1300.0).epsilon(0.02));
  CHECK(rec.volume_ratio == doctest::Approx(0.1875).scale(1.0).epsilon(0.01));
}

TEST_CASE("extract_intersection rejects an empty intersection") {
  const TriMesh far_away = make_box(Vec3(5, 5, 5), Vec3(100, 100, 100));
  CHECK_THROWS_AS(extract_intersection(far_away, finger_lattice()), std::runtime_error);
}

TEST_CASE("depth of interest: flat wall, pocket, slant") {
  CHECK(depth_of_interest(flat_wall(), kD) == doctest::Approx(0.0));
  CHECK(depth_of_interest(pocket_wall(3.0), kD) == doctest::Approx(3.0).scale(1.0).epsilon(kH));
  CHECK(depth_of_interest(slant(), kD) == doctest::Approx(kD));
}

TEST_CASE("normal clustering: box, flat wall, hemisphere") {
  const auto box_clusters = cluster_normals(make_box(Vec3(10, 10, 10)), 10.0);
  REQUIRE(box_clusters.size() == 6);
  for (const auto& c : box_clusters) CHECK(c.area == doctest::Approx(100.0).epsilon(1e-9));

  const auto wall_clusters = cluster_normals(extract_surface(flat_wall()), 10.0);
  CHECK(std::abs(wall_clusters.front().mean_direction.z()) > std::cos(10.0 * M_PI / 180.0));

  // uv hemisphere, open at the equator
  TriMesh hemi;
  const int n_theta = 12, n_phi = 48;
  for (int t = 0; t <= n_theta; ++t)
    for (int p = 0; p < n_phi; ++p) {
      const double theta = (M_PI / 2.0) * t / n_theta;
      const double phi = 2.0 * M_PI * p / n_phi;
      hemi.vertices.emplace_back(std::sin(theta) * std::cos(phi),
                                 std::sin(theta) * std::sin(phi), std::cos(theta));
    }
  for (int t = 0; t < n_theta; ++t)
    for (int p = 0; p < n_phi; ++p) {
      const int q = (p + 1) % n_phi;
      const int a = t * n_phi + p, b = t * n_phi + q;
      const int c = (t + 1) * n_phi + p, d = (t + 1) * n_phi + q;
      hemi.faces.push_back({a, d, b});
      hemi.faces.push_back({a, c, d});
    }
  const auto hemi_clusters = cluster_normals(hemi, 10.0);
  const double total = surface_area(hemi);
  CHECK(hemi_clusters.front().area < 0.5 * total);
}

TEST_CASE("classification: ratio route and cluster fallback") {
  FilterParams params;

  GeometryRecord pocket = make_record(pocket_wall(3.0));
  CHECK(pocket.route == FilterRoute::volume_ratio);
  CHECK(pocket.label == GeometryLabel::good);

  // shallow dent: R = 0.05 at d approximately 0.75, below threshold
  GeometryRecord dent = make_record(pocket_wall(0.75));
  CHECK(dent.route == FilterRoute::volume_ratio);
  CHECK(dent.volume_ratio == doctest::Approx(0.05).epsilon(0.1));
  CHECK(dent.label == GeometryLabel::bad);

  GeometryRecord wall = make_record(flat_wall());
  CHECK(wall.label == GeometryLabel::bad);

  GeometryRecord edge = make_record(slant());
  CHECK(edge.route == FilterRoute::normal_cluster);
  CHECK(edge.volume_ratio == doctest::Approx(0.5).epsilon(0.1));
  CHECK(edge.label == GeometryLabel::good);
}

TEST_CASE("synthesis: only good records runs the plain three-step procedure") {
  const auto r1 = make_record(pocket_wall(3.0, 2, 2, 8));
  const auto r2 = make_record(pocket_wall(2.0, 9, 9, 10));
  const PadGeometry pad = synthesize_pad({r1, r2}, {}, box_spec());
  CHECK(pad.pad_case == PadCase::all_good);
  CHECK(pad.block_depth == 0.0);
  CHECK(pad.geometry_count == 2);

  const OccupancyGrid expected = grid_bool(
      OccupancyGrid(finger_lattice(), true),
      grid_bool(r1.grid, r2.grid, BoolOp::unite), BoolOp::subtract);
  CHECK(pad.grid.cells() == expected.cells());
  CHECK(open_edge_count(pad.mesh) == 0);
}

TEST_CASE("synthesis: only bad records gives the flat pad of thickness T - D") {
  const auto wall = make_record(flat_wall());
  const PadGeometry pad = synthesize_pad({wall, wall}, {}, box_spec());
  CHECK(pad.pad_case == PadCase::all_bad);

  const GridSpec spec = finger_lattice();
  for (int k = 0; k < spec.nz(); ++k) {
    const bool expect = spec.cell_center_local(0, 0, k).z() < 1.0;
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) CHECK(pad.grid.at(i, j, k) == expect);
  }
  CHECK(grid_volume(pad.grid) == doctest::Approx(400.0).epsilon(1e-9));
}

TEST_CASE("synthesis: mixed case uses the block depth d_B = K * min(d_n)") {
  FilterParams params;  // K = 1.5
  const auto good = make_record(pocket_wall(2.0));
  const auto bad = make_record(flat_wall());
  const PadGeometry pad = synthesize_pad({good, bad}, params, box_spec());
  CHECK(pad.pad_case == PadCase::mixed);
  CHECK(pad.block_depth == doctest::Approx(3.0).epsilon(1e-9));

  // no pad cell deeper than T - d_B
  const GridSpec spec = finger_lattice();
  for (int k = 0; k < spec.nz(); ++k)
    if (spec.cell_center_local(0, 0, k).z() > 5.0 - pad.block_depth)
      for (int j = 0; j < spec.ny(); ++j)
        for (int i = 0; i < spec.nx(); ++i) CHECK_FALSE(pad.grid.at(i, j, k));
}

TEST_CASE("block depth clamps at the penetration depth") {
  FilterParams params;
  const auto good = make_record(pocket_wall(3.0));  // 3 * 1.5 = 4.5 > D
  const auto bad = make_record(flat_wall());
  const PadGeometry pad = synthesize_pad({good, bad}, params, box_spec());
  CHECK(pad.block_depth == doctest::Approx(kD));
}

TEST_CASE("absorption prevention: the pocket survives a bad companion") {
  FilterParams params;  // K = 1.5, block depth 2.25 clears the 1.5 mm pocket
  const auto good = make_record(pocket_wall(1.5, 4, 4, 12));
  const auto bad = make_record(flat_wall());

  const PadGeometry mixed = synthesize_pad({good, bad}, params, box_spec());
  const PadGeometry reference = synthesize_pad({good}, params, box_spec());
  CHECK(mixed.pad_case == PadCase::mixed);
  CHECK(reference.pad_case == PadCase::all_good);

  // the all-bad slab occupies only w < 1; the mixed pad must differ from it
  const auto slab = synthesize_pad({bad}, params, box_spec());
  CHECK(mixed.grid.cells() != slab.grid.cells());

  // inside the pocket column the mixed pad matches the all-good pad cellwise
  const GridSpec spec = finger_lattice();
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 c = spec.cell_center_local(i, j, k);
        if (c.x() > 4 && c.x() < 16 && c.y() > 4 && c.y() < 16)
          CHECK(mixed.grid.at(i, j, k) == reference.grid.at(i, j, k));
      }
}

TEST_CASE("non-penetration: pad never occupies a good record's cells") {
  FilterParams params;
  const auto good1 = make_record(pocket_wall(2.0, 3, 3, 6));
  const auto good2 = make_record(slant());
  const auto bad = make_record(flat_wall());
  for (const auto& records :
       {std::vector<GeometryRecord>{good1, good2}, {good1, bad}, {good1, good2, bad}}) {
    const PadGeometry pad = synthesize_pad(records, params, box_spec());
    for (const auto& rec : records) {
      if (rec.label != GeometryLabel::good) continue;
      const OccupancyGrid overlap = grid_bool(pad.grid, rec.grid, BoolOp::intersect);
      CHECK(overlap.occupied_count() == 0);
    }
  }
}

TEST_CASE("synthesis is invariant to record order") {
  FilterParams params;
  std::vector<GeometryRecord> records{make_record(pocket_wall(2.0, 2, 2, 8)),
                                      make_record(pocket_wall(3.0, 12, 4, 6)),
                                      make_record(flat_wall())};
  const PadGeometry base = synthesize_pad(records, params, box_spec());
  std::mt19937 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(records.begin(), records.end(), rng);
    CHECK(synthesize_pad(records, params, box_spec()).grid.cells() == base.grid.cells());
  }
}

TEST_CASE("conservation: pad and removed material partition the box") {
  FilterParams params;
  const auto good = make_record(pocket_wall(2.0));
  const auto bad = make_record(flat_wall());
  const PadGeometry pad = synthesize_pad({good, bad}, params, box_spec());
  const OccupancyGrid removed =
      grid_bool(OccupancyGrid(finger_lattice(), true), pad.grid, BoolOp::subtract);
  CHECK(grid_volume(pad.grid) + grid_volume(removed) == 2000.0);
  CHECK(grid_bool(pad.grid, removed, BoolOp::intersect).occupied_count() == 0);
}

TEST_CASE("raising K only removes more material in the mixed case") {
  const auto good = make_record(pocket_wall(2.0));
  const auto bad = make_record(flat_wall());
  double previous_pad_volume = std::numeric_limits<double>::infinity();
  for (double k_gain : {1.0, 1.25, 1.5, 2.0}) {
    FilterParams params;
    params.flatness_gain = k_gain;
    const PadGeometry pad = synthesize_pad({good, bad}, params, box_spec());
    CHECK(grid_volume(pad.grid) <= previous_pad_volume);
    previous_pad_volume = grid_volume(pad.grid);
  }
}

TEST_CASE("combination counting") {
  CHECK(count_combinations({3, 4}) == 12);
  CHECK(count_combinations({3, 3}) == 9);
  CHECK(count_combinations({5}) == 5);
  CHECK_THROWS_WITH_AS(count_combinations({3, 0}), doctest::Contains("no feasible grasp"),
                       std::runtime_error);
}
