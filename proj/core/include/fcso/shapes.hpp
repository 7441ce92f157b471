#pragma once

#include "fcso/trimesh.hpp"

namespace fcso {

/// Axis-aligned box [origin, origin+extents], outward winding, 12 faces.
TriMesh make_box(const Vec3& extents, const Vec3& origin = Vec3::Zero());

/// Subdivided icosahedron with vertices on the sphere.
TriMesh make_icosphere(double radius, const Vec3& center = Vec3::Zero(), int subdivisions = 3);

/// Ellipsoid (scaled icosphere).
TriMesh make_ellipsoid(const Vec3& semi_axes, const Vec3& center = Vec3::Zero(),
                       int subdivisions = 3);

/// Flat gripper finger: a box whose pad face is the +X face, centered on
/// Y/Z. `pad_l`/`pad_w` size the pad face, `depth` the finger thickness.
TriMesh make_flat_finger(double pad_l = 24.0, double pad_w = 24.0, double depth = 8.0);

/// Asymmetric rabbit-like figurine (ribbed body, head, ears, tail) resting
/// on z=0, about 69 mm tall, built from overlapping closed shells so the
/// surfaces stay smooth. A plinth and a back slab give it flat resting
/// faces. A bunny-scale stand-in for grasp tests and demos.
TriMesh make_bunny_figurine(int subdivisions = 4);

}  // namespace fcso
