#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fcso/geometry.hpp"

namespace fcso {

/// Indexed triangle surface mesh in millimeters. Immutable by convention:
/// every operation returns a new mesh, so meshes can be shared across
/// worker threads freely.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  const Vec3& v(int face, int corner) const { return vertices[faces[face][corner]]; }

  /// Right-hand-rule face normal, unit length. Degenerate faces yield a
  /// zero vector.
  Vec3 face_normal(std::size_t f) const;
  double face_area(std::size_t f) const;
  Vec3 face_centroid(std::size_t f) const;
};

/// Number of undirected edges whose forward/backward face uses do not
/// balance. Zero means the surface is closed and consistently oriented,
/// which is what signed volumes and centroids require.
int open_edge_count(const TriMesh& mesh);

bool is_watertight(const TriMesh& mesh);

/// Divergence-theorem volume in mm^3; positive for outward winding.
/// Throws if the mesh is not watertight.
double signed_volume(const TriMesh& mesh);

/// Uniform-density centroid. Requires watertight mesh with positive volume.
Vec3 center_of_mass(const TriMesh& mesh);

double surface_area(const TriMesh& mesh);

Aabb bounding_box(const TriMesh& mesh);

/// Apply a rigid transform to every vertex. Throws if the rotation block
/// is not orthonormal with determinant +1.
TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t);

/// Concatenate as independent shells (no welding).
TriMesh concatenate(const TriMesh& a, const TriMesh& b);

/// Merge vertices closer than `tol` and drop faces that degenerate.
TriMesh deduplicate_vertices(const TriMesh& mesh, double tol = 1e-6);

}  // namespace fcso
