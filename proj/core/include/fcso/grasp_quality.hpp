#pragma once

#include <vector>

#include "fcso/mesh_query.hpp"
#include "fcso/trimesh.hpp"
#include "fcso/voxel_grid.hpp"

namespace fcso {

/// Faces of a placed pad lying within epsilon of the object surface.
struct ContactPatch {
  std::vector<int> faces;        // pad face indices
  std::vector<Vec3> normals;     // world-frame unit normals, one per face
  std::vector<double> areas;     // mm^2, one per face
  double area = 0.0;             // total
  bool degenerate() const { return faces.empty(); }
};

/// Contact between one placed copy of the pad and the object. The pad mesh
/// is given in its canonical frame and positioned by `placement`.
ContactPatch extract_contact(const TriMesh& pad_mesh, const RigidTransform& placement,
                             const TriangleBvh& object_surface, double epsilon);

/// Both fingers of a grasp: the pad placed at each side frame.
std::array<ContactPatch, 2> extract_contact_pair(const TriMesh& pad_mesh,
                                                 const std::array<GridSpec, 2>& side_frames,
                                                 const TriangleBvh& object_surface,
                                                 double epsilon);

/// Radius of the largest empty sphere: map each normal to a point on the
/// unit sphere and return the largest chord distance from any point of the
/// sphere to its nearest mapped normal. Candidate centers come from the
/// spherical Voronoi vertices (normalized circumcenters of the convex-hull
/// Delaunay triangles) plus antipodes; degenerate inputs fall back to a
/// 2-degree grid search, and a single repeated direction returns exactly 2.
double rles(const std::vector<Vec3>& normals);

/// E = A / RLES.
double effective_area(double rles_value, double contact_area);

struct QualityRecord {
  int combination = 0;  // i, 1-based
  int pose = 0;         // m, 1-based
  double rles_value = 0.0;
  double contact_area = 0.0;  // A, both fingers
  double effective = 0.0;     // E
};

struct SelectionResult {
  std::vector<int> combination_ids;  // ascending
  std::vector<double> quality;       // Q_i per combination
  int best_combination = 0;
  double best_quality = 0.0;         // Q_max
};

/// Min over poses per combination, then argmax across combinations; ties go
/// to the lowest combination id. Every combination must cover the same set
/// of poses.
SelectionResult select_best(const std::vector<QualityRecord>& records);

}  // namespace fcso
