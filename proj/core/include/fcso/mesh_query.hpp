#pragma once

#include <vector>

#include "fcso/trimesh.hpp"

namespace fcso {

/// Bounding-volume hierarchy over mesh triangles for point-distance and
/// inside/outside queries. Read-only after construction.
class TriangleBvh {
 public:
  explicit TriangleBvh(const TriMesh& mesh);

  /// Unsigned distance from p to the surface.
  double distance(const Vec3& p) const;

  /// Nearest face index; optionally reports the distance.
  int nearest_face(const Vec3& p, double* dist_out = nullptr) const;

  /// Winding-number inside test along a probe ray, so unions of overlapping
  /// closed shells behave as solids. Points within `surface_tol` of the
  /// surface count as inside; rays that graze an edge or vertex are recast
  /// in a deterministically perturbed direction.
  bool contains(const Vec3& p, double surface_tol = 1e-9) const;

  const Aabb& bounds() const { return root_bounds_; }

 private:
  struct Node {
    Aabb box;
    int left = -1;   // internal: child index; leaf: first triangle
    int right = -1;  // internal: child index; leaf: -1
    int count = 0;   // leaf triangle count, 0 for internal nodes
  };

  int build(int begin, int end, std::vector<int>& order, std::vector<Vec3>& centroids);
  // -1 outside, +1 inside, 0 undecided (degenerate hit)
  int winding_along(const Vec3& p, const Vec3& dir, double surface_tol) const;

  std::vector<Vec3> va_, vb_, vc_;  // triangle vertices in BVH order
  std::vector<int> tri_index_;
  std::vector<Node> nodes_;
  Aabb root_bounds_;
};

/// Batch inside test; requires a watertight mesh. Non-finite points map to
/// false.
std::vector<bool> contains_points(const TriMesh& mesh, const std::vector<Vec3>& points);

}  // namespace fcso
