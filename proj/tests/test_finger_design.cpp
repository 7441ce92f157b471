#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fcso/finger_design.hpp"
#include "fcso/mesh_query.hpp"
#include "fcso/pad_synth.hpp"
#include "fcso/shapes.hpp"
#include "fcso/stl_io.hpp"
#include "fcso/surface_extract.hpp"

using namespace fcso;

namespace {

SampleBoxSpec box_spec() {
  SampleBoxSpec s;
  s.length = 20;
  s.width = 20;
  s.thickness = 5;
  s.penetration = 4;
  s.stride = 4;
  return s;
}

// pad with a conforming tooth, straight from the synthesis path
PadGeometry tooth_pad() {
  const GridSpec lattice(RigidTransform::identity(), Vec3(20, 20, 5), 0.25);
  OccupancyGrid object(lattice);
  for (int k = 0; k < lattice.nz(); ++k)
    for (int j = 0; j < lattice.ny(); ++j)
      for (int i = 0; i < lattice.nx(); ++i) {
        const Vec3 c = lattice.cell_center_local(i, j, k);
        if (c.z() < 1.0) continue;
        const bool pocket = c.x() > 4 && c.x() < 16 && c.y() > 4 && c.y() < 16 && c.z() < 4.0;
        object.set(i, j, k, !pocket);
      }
  GeometryRecord rec{object};
  rec.intersection_volume = grid_volume(rec.grid);
  rec.bounding_volume = occupied_aabb(rec.grid).volume;
  rec.volume_ratio = (rec.bounding_volume - rec.intersection_volume) / rec.bounding_volume;
  rec.depth_of_interest = depth_of_interest(rec.grid, 4.0);
  classify_geometry(rec, {}, 4.0);
  REQUIRE(rec.label == GeometryLabel::good);
  return synthesize_pad({rec}, {}, box_spec());
}

}  // namespace

TEST_CASE("shell fusion concatenates two printable shells") {
  const TriMesh finger = make_flat_finger(24, 24, 8);
  const PadGeometry pad = tooth_pad();
  const FingerAssembly fa = assemble_finger(finger, pad.mesh, box_spec(), FusionMode::shell);

  const double finger_vol = signed_volume(finger);
  const double pad_vol = signed_volume(pad.mesh);
  // overlapping shells double-count the embedded sliver
  CHECK(signed_volume(fa.fused) == doctest::Approx(finger_vol + pad_vol).epsilon(1e-9));
  CHECK(signed_volume(fa.fused) >= finger_vol);
}

TEST_CASE("remesh fusion produces one watertight body with the union volume") {
  const TriMesh finger = make_flat_finger(24, 24, 8);
  const PadGeometry pad = tooth_pad();
  const FingerAssembly fa = assemble_finger(finger, pad.mesh, box_spec(), FusionMode::remesh);

  CHECK(open_edge_count(fa.fused) == 0);
  const double overlap = 0.2 * 20.0 * 20.0;  // embed depth times pad footprint
  const double expected = signed_volume(finger) + signed_volume(pad.mesh) - overlap;
  CHECK(signed_volume(fa.fused) == doctest::Approx(expected).epsilon(0.02));
  CHECK(signed_volume(fa.fused) >= signed_volume(finger));
}

TEST_CASE("the conforming surface survives remesh fusion") {
  const TriMesh finger = make_flat_finger(24, 24, 8);
  const PadGeometry pad = tooth_pad();
  const double h = 0.25;
  const FingerAssembly fa = assemble_finger(finger, pad.mesh, box_spec(), FusionMode::remesh, h);

  const TriangleBvh fused_bvh(fa.fused);
  int sampled = 0;
  for (std::size_t f = 0; f < pad.mesh.faces.size() && sampled < 1000; ++f) {
    const Vec3 centroid = pad.mesh.face_centroid(f);
    if (centroid.z() < 1.0) continue;  // conforming zone only
    ++sampled;
    const Vec3 world = fa.mount.apply(centroid);
    CHECK(fused_bvh.distance(world) <= 2.0 * h + 1e-9);
  }
  CHECK(sampled >= 1000);
}

TEST_CASE("fused output reloads through STL with positive volume") {
  const TriMesh finger = make_flat_finger(24, 24, 8);
  const PadGeometry pad = tooth_pad();
  for (FusionMode mode : {FusionMode::shell, FusionMode::remesh}) {
    const FingerAssembly fa = assemble_finger(finger, pad.mesh, box_spec(), mode);
    const TriMesh back = load_stl(save_stl(fa.fused));
    CHECK(signed_volume(back) > 0.0);
  }
}

TEST_CASE("fusion preconditions") {
  const PadGeometry pad = tooth_pad();
  const TriMesh finger = make_flat_finger(24, 24, 8);

  CHECK_THROWS_AS(fuse_pad(TriMesh{}, pad.mesh, RigidTransform::identity(), FusionMode::shell),
                  std::invalid_argument);
  CHECK_THROWS_AS(fuse_pad(finger, TriMesh{}, RigidTransform::identity(), FusionMode::shell),
                  std::invalid_argument);

  // a gap between pad base and finger face is a floating pad
  RigidTransform gap = pad_mount_transform(finger, box_spec());
  gap.translation.x() += 1.0;
  CHECK_THROWS_WITH_AS(fuse_pad(finger, pad.mesh, gap, FusionMode::shell),
                       doctest::Contains("floating pad"), std::runtime_error);

  // embedding beyond half a millimeter is rejected too
  RigidTransform deep = pad_mount_transform(finger, box_spec());
  deep.translation.x() -= 1.0;
  CHECK_THROWS_AS(fuse_pad(finger, pad.mesh, deep, FusionMode::shell), std::runtime_error);
}
