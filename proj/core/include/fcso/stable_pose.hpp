#pragma once

#include <cstdint>
#include <vector>

#include "fcso/trimesh.hpp"

namespace fcso {

/// One resting orientation: `transform` places the object with the support
/// facet on z=0 and the center of mass above the origin. The grasp approach
/// direction is world -Z.
struct StablePose {
  RigidTransform transform;
  std::vector<int> support_facet;  // hull face indices of the merged support facet
  double probability = 0.0;        // solid-angle share, informational ordering
};

struct PoseSelectionMode {
  enum Kind { random, manual } kind = random;
  std::uint64_t seed = 0;
  std::vector<int> indices;  // manual mode, 0-based into the enumerated list

  static PoseSelectionMode random_seeded(std::uint64_t seed) {
    return {random, seed, {}};
  }
  static PoseSelectionMode manual_indices(std::vector<int> idx) {
    return {manual, 0, std::move(idx)};
  }
};

struct PoseSelection {
  std::vector<StablePose> poses;
  std::vector<int> indices;  // positions in the enumerated list
};

struct StablePoseParams {
  double com_margin = 0.5;        // mm inside the support polygon
  double merge_normal_deg = 0.5;  // coplanar facet merge tolerance
  double merge_offset = 1e-3;     // mm
};

/// Resting orientations from the simplified quasistatic model: a merged
/// convex-hull facet supports the object when the center of mass projects
/// at least `com_margin` inside it. Probability is the facet solid angle
/// seen from the center of mass, renormalized over stable facets; the list
/// is sorted by descending probability.
std::vector<StablePose> enumerate_stable_poses(const TriMesh& mesh,
                                               const StablePoseParams& params = {});

/// Pick count poses, reproducibly for a given seed. Manual indices are
/// returned in the requested order and must be unique and in range.
PoseSelection select_poses(const std::vector<StablePose>& poses, int count,
                           const PoseSelectionMode& mode);

}  // namespace fcso
