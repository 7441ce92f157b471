#pragma once

#include <optional>
#include <vector>

#include "fcso/trimesh.hpp"
#include "fcso/voxel_grid.hpp"

namespace fcso {

/// Rectangular sample box: L along the sliding (lateral) axis, W vertical,
/// T along the closing axis, penetrating depth D into the object.
struct SampleBoxSpec {
  double length = 20.0;     // L
  double width = 20.0;      // W
  double thickness = 5.0;   // T
  double penetration = 4.0; // D, 0 < D < T
  double stride = 4.0;

  void validate() const {
    if (!(length > 0.0 && width > 0.0 && thickness > 0.0))
      throw std::invalid_argument("SampleBoxSpec: box extents must be positive");
    if (!(penetration > 0.0 && penetration < thickness))
      throw std::invalid_argument("SampleBoxSpec: penetration depth must satisfy 0 < D < T");
    if (!(stride > 0.0)) throw std::invalid_argument("SampleBoxSpec: stride must be positive");
  }
};

struct GripperSpec {
  double max_opening = 50.0;
  /// Clearance box of the gripper body above the fingers:
  /// (along closing axis, along lateral axis, upward).
  Vec3 body_clearance_box = Vec3(30.0, 90.0, 60.0);
  TriMesh flat_finger_mesh;
  double min_contact_volume = 50.0;     // mm^3 per side
  double min_contact_footprint = 25.0;  // mm^2 per side, projected along closing axis
};

/// A paired placement of the two sample boxes on a posed object. Side 0
/// closes along +closing_axis, side 1 along -closing_axis; the side frames
/// are 180-degree rotations of each other about the vertical axis, so one
/// pad geometry serves both fingers and their box volumes mirror across the
/// grasp mid-plane.
struct GraspCandidate {
  int pose_id = 0;
  Vec3 closing_axis = Vec3::UnitX();     // pose frame, horizontal, unit
  std::array<GridSpec, 2> side_frames;
  double grasp_width = 0.0;
  double contact_volume = 0.0;           // both sides, used for cap ranking
  // canonical lattice position (axis index, z step, lateral step)
  int axis_index = 0, z_step = 0, lateral_step = 0;
};

enum class RejectReason { none, contact, collision, opening };

struct FeasibilityResult {
  RejectReason reason = RejectReason::none;
  double contact_volume = 0.0;
  bool valid() const { return reason == RejectReason::none; }
};

struct SamplerParams {
  double voxel_h = 0.25;
  int max_candidates_per_pose = 64;  // overflow keeps the largest contact volumes
  double body_probe_h = 1.0;         // resolution of the body clearance check
};

/// All feasibility checks from one place so sweep and tests agree:
/// (a) per side, object-box intersection volume and projected footprint
///     reach the gripper thresholds,
/// (b) the sample boxes stay above the table and the gripper body box is
///     disjoint from the object,
/// (c) the grasp width fits the opening.
FeasibilityResult check_feasibility(const GraspCandidate& candidate, const TriMesh& posed_mesh,
                                    const SampleBoxSpec& spec, const GripperSpec& gripper,
                                    const SamplerParams& params = {});

/// Slide the paired boxes over a posed object (resting on z=0) and return
/// the feasible placements in canonical order (closing axis, then height,
/// then lateral position). Deterministic; an empty list is a valid outcome.
std::vector<GraspCandidate> sample_grasps(const TriMesh& posed_mesh, const SampleBoxSpec& spec,
                                          const GripperSpec& gripper,
                                          const SamplerParams& params = {});

}  // namespace fcso
