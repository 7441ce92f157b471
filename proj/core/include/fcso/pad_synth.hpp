#pragma once

#include <vector>

#include "fcso/grasp_sampler.hpp"
#include "fcso/voxel_grid.hpp"

namespace fcso {

struct FilterParams {
  double volume_ratio_threshold = 0.1;  // th in (0,1)
  double flatness_gain = 1.5;           // K >= 1
  double cluster_tol_deg = 10.0;
  double perp_tol_deg = 10.0;
};

enum class GeometryLabel { good, bad };
enum class FilterRoute { volume_ratio, normal_cluster };

/// One extracted intersection in the canonical finger frame (identity
/// placement; u lateral, v vertical, w along the closing axis with the box
/// inner face at w = T).
struct GeometryRecord {
  OccupancyGrid grid;
  double intersection_volume = 0.0;  // V_I
  double bounding_volume = 0.0;      // V_B
  double volume_ratio = 0.0;         // R = (V_B - V_I) / V_B
  double depth_of_interest = 0.0;    // d_n in [0, D]
  GeometryLabel label = GeometryLabel::bad;
  FilterRoute route = FilterRoute::volume_ratio;
  /// Object faces inside the box, canonical frame. The cluster fallback
  /// reads the true surface normals from here; when empty (records built
  /// straight from grids) it clusters the extracted grid surface instead.
  TriMesh surface_patch;
  // provenance, filled by the pipeline
  int pose_id = 0;
  int candidate_index = 0;
  int side = 0;
};

/// Voxelize the object inside one side frame and rebase the field into the
/// canonical finger frame. Throws when the intersection is empty (such a
/// candidate should have been rejected by feasibility).
GeometryRecord extract_intersection(const TriMesh& posed_mesh, const GridSpec& side_frame);

/// Depth, measured inward from the first object layer, at which the cross
/// section of the occupied bounding box becomes fully object and stays so.
/// D when that never happens before the deepest layer.
double depth_of_interest(const OccupancyGrid& grid, double penetration_depth);

struct NormalCluster {
  Vec3 mean_direction = Vec3::Zero();
  double area = 0.0;
};

/// Greedy area-weighted clustering of face normals: each face joins the
/// first cluster whose mean lies within tol_deg, else starts a new one.
/// Sorted by descending area.
std::vector<NormalCluster> cluster_normals(const TriMesh& surface, double tol_deg);

/// Volume-ratio filter with the normal-cluster fallback for d_n = D, where
/// the ratio is not meaningful. Sets label and route on the record.
GeometryLabel classify_geometry(GeometryRecord& rec, const FilterParams& params,
                                double penetration_depth);

enum class PadCase { all_good, all_bad, mixed };

struct PadGeometry {
  OccupancyGrid grid;  // P, canonical finger frame
  TriMesh mesh;
  PadCase pad_case = PadCase::all_good;
  double block_depth = 0.0;  // d_B, zero when no block was used
  int geometry_count = 0;    // N
};

/// Boolean synthesis of the fingerpad from classified records:
///   all good:  P = S - union(I_n)
///   all bad:   P = slab of thickness T - D on the outer side
///   mixed:     P = S - (union of good I_n + full-footprint block of depth
///              d_B = K * min(d_n over good records) from the inner face,
///              clamped to D)
PadGeometry synthesize_pad(const std::vector<GeometryRecord>& records,
                           const FilterParams& params, const SampleBoxSpec& spec);

/// C = product of valid-pair counts across poses; throws when a pose has
/// none.
long long count_combinations(const std::vector<int>& per_pose_counts);

}  // namespace fcso
