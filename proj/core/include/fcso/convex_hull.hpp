#pragma once

#include <vector>

#include "fcso/trimesh.hpp"

namespace fcso {

/// Quickhull. Returns a watertight, outward-oriented triangulated hull whose
/// vertex list holds only the points on the hull. Throws std::invalid_argument
/// when the input has no four affinely independent points.
TriMesh convex_hull(const std::vector<Vec3>& points);

inline TriMesh convex_hull(const TriMesh& mesh) { return convex_hull(mesh.vertices); }

}  // namespace fcso
