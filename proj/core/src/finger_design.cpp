#include "fcso/finger_design.hpp"

#include <algorithm>
#include <cmath>

#include "fcso/surface_extract.hpp"
#include "fcso/voxel_grid.hpp"

namespace fcso {

RigidTransform pad_mount_transform(const TriMesh& finger, const SampleBoxSpec& box,
                                   double embed) {
  if (finger.empty()) throw std::invalid_argument("pad_mount_transform: empty finger mesh");
  const Aabb fb = bounding_box(finger);
  RigidTransform mount;
  // pad (u,v,w) -> finger (y,z,x): the pad grows outward along +X
  mount.rotation.col(0) = Vec3::UnitY();
  mount.rotation.col(1) = Vec3::UnitZ();
  mount.rotation.col(2) = Vec3::UnitX();
  mount.translation = Vec3(fb.max.x() - embed,
                           fb.center().y() - box.length / 2.0,
                           fb.center().z() - box.width / 2.0);
  return mount;
}

TriMesh fuse_pad(const TriMesh& finger, const TriMesh& pad, const RigidTransform& mount,
                 FusionMode mode, double voxel_h) {
  if (finger.empty()) throw std::invalid_argument("fuse_pad: empty finger mesh");
  if (pad.empty()) throw std::invalid_argument("fuse_pad: empty pad mesh");

  const TriMesh placed = apply_transform(pad, mount);
  const Aabb fb = bounding_box(finger);
  const Aabb pb = bounding_box(placed);

  const double embed = fb.max.x() - pb.min.x();
  if (embed < -1e-9)
    throw std::runtime_error("fuse_pad: floating pad (gap of " + std::to_string(-embed) +
                             " mm to the finger face)");
  if (embed > 0.5 + 1e-9)
    throw std::runtime_error("fuse_pad: pad embeds " + std::to_string(embed) +
                             " mm into the finger, beyond the 0.5 mm limit");
  const bool overlaps_face = pb.min.y() < fb.max.y() && pb.max.y() > fb.min.y() &&
                             pb.min.z() < fb.max.z() && pb.max.z() > fb.min.z();
  if (!overlaps_face)
    throw std::runtime_error("fuse_pad: floating pad (footprint misses the finger face)");

  if (mode == FusionMode::shell) return concatenate(finger, placed);

  // remesh: voxel union of both bodies, then one watertight surface
  Aabb region = fb;
  region.expand(pb);
  region.min -= Vec3::Constant(2.0 * voxel_h);
  region.max += Vec3::Constant(2.0 * voxel_h);
  GridSpec spec(RigidTransform::translate(region.min), region.extents(), voxel_h);
  OccupancyGrid merged =
      grid_bool(voxelize(finger, spec), voxelize(placed, spec), BoolOp::unite);
  return extract_surface(merged);
}

FingerAssembly assemble_finger(const TriMesh& finger, const TriMesh& pad,
                               const SampleBoxSpec& box, FusionMode mode, double voxel_h,
                               double embed) {
  FingerAssembly out;
  out.finger = finger;
  out.pad = pad;
  out.mount = pad_mount_transform(finger, box, embed);
  out.fused = fuse_pad(finger, pad, out.mount, mode, voxel_h);
  return out;
}

}  // namespace fcso
