#include "fcso/grasp_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "fcso/parallel.hpp"

namespace fcso {

namespace {

// World-aligned occupancy of the whole posed object, padded by two cells.
OccupancyGrid build_probe(const TriMesh& mesh, double h) {
  Aabb box = bounding_box(mesh);
  box.min -= Vec3::Constant(2.0 * h);
  box.max += Vec3::Constant(2.0 * h);
  GridSpec spec(RigidTransform::translate(box.min), box.extents(), h);
  return voxelize(mesh, spec);
}

bool probe_hits_box(const OccupancyGrid& probe, const Aabb& world_box) {
  const GridSpec& s = probe.spec();
  const Vec3 org = s.frame.translation;
  const double h = s.resolution;
  const int i0 = std::max(0, static_cast<int>(std::ceil((world_box.min.x() - org.x()) / h - 0.5)));
  const int i1 = std::min(s.nx() - 1, static_cast<int>(std::floor((world_box.max.x() - org.x()) / h - 0.5)));
  const int j0 = std::max(0, static_cast<int>(std::ceil((world_box.min.y() - org.y()) / h - 0.5)));
  const int j1 = std::min(s.ny() - 1, static_cast<int>(std::floor((world_box.max.y() - org.y()) / h - 0.5)));
  const int k0 = std::max(0, static_cast<int>(std::ceil((world_box.min.z() - org.z()) / h - 0.5)));
  const int k1 = std::min(s.nz() - 1, static_cast<int>(std::floor((world_box.max.z() - org.z()) / h - 0.5)));
  for (int k = k0; k <= k1; ++k)
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (probe.at(i, j, k)) return true;
  return false;
}

double projected_footprint(const OccupancyGrid& g) {
  const GridSpec& s = g.spec();
  int columns = 0;
  for (int j = 0; j < s.ny(); ++j)
    for (int i = 0; i < s.nx(); ++i) {
      for (int k = 0; k < s.nz(); ++k)
        if (g.at(i, j, k)) {
          ++columns;
          break;
        }
    }
  return columns * s.resolution * s.resolution;
}

Aabb box_of_frame(const GridSpec& frame) {
  Aabb out;
  for (int c = 0; c < 8; ++c) {
    const Vec3 local((c & 1) ? frame.extents.x() : 0.0, (c & 2) ? frame.extents.y() : 0.0,
                     (c & 4) ? frame.extents.z() : 0.0);
    out.expand(frame.frame.apply(local));
  }
  return out;
}

Aabb body_box_for(const GraspCandidate& cand, const SampleBoxSpec& spec,
                  const GripperSpec& gripper) {
  // inner-face centers of both boxes define the grasp center
  Vec3 center = Vec3::Zero();
  double top_z = 0.0;
  for (int s = 0; s < 2; ++s) {
    const GridSpec& f = cand.side_frames[s];
    center += 0.5 * f.frame.apply(Vec3(spec.length / 2.0, spec.width / 2.0, spec.thickness));
    top_z = std::max(top_z, box_of_frame(f).max.z());
  }
  const int closing = std::abs(cand.closing_axis.x()) > 0.5 ? 0 : 1;
  const int lateral = 1 - closing;
  Aabb out;
  out.min[closing] = center[closing] - gripper.body_clearance_box.x() / 2.0;
  out.max[closing] = center[closing] + gripper.body_clearance_box.x() / 2.0;
  out.min[lateral] = center[lateral] - gripper.body_clearance_box.y() / 2.0;
  out.max[lateral] = center[lateral] + gripper.body_clearance_box.y() / 2.0;
  out.min.z() = top_z;
  out.max.z() = top_z + gripper.body_clearance_box.z();
  return out;
}

FeasibilityResult feasibility_with_probe(const GraspCandidate& cand, const TriMesh& posed_mesh,
                                         const SampleBoxSpec& spec, const GripperSpec& gripper,
                                         const OccupancyGrid& body_probe) {
  FeasibilityResult result;

  for (int s = 0; s < 2; ++s) {
    OccupancyGrid side = voxelize(posed_mesh, cand.side_frames[s]);
    const double volume = grid_volume(side);
    if (volume < gripper.min_contact_volume - 1e-9 ||
        projected_footprint(side) < gripper.min_contact_footprint - 1e-9) {
      result.reason = RejectReason::contact;
      return result;
    }
    result.contact_volume += volume;
  }

  for (int s = 0; s < 2; ++s) {
    if (box_of_frame(cand.side_frames[s]).min.z() < -1e-9) {
      result.reason = RejectReason::collision;
      return result;
    }
  }
  if (probe_hits_box(body_probe, body_box_for(cand, spec, gripper))) {
    result.reason = RejectReason::collision;
    return result;
  }

  if (cand.grasp_width > gripper.max_opening + 1e-9) {
    result.reason = RejectReason::opening;
    return result;
  }
  return result;
}

}  // namespace

FeasibilityResult check_feasibility(const GraspCandidate& candidate, const TriMesh& posed_mesh,
                                    const SampleBoxSpec& spec, const GripperSpec& gripper,
                                    const SamplerParams& params) {
  return feasibility_with_probe(candidate, posed_mesh, spec, gripper,
                                build_probe(posed_mesh, params.body_probe_h));
}

std::vector<GraspCandidate> sample_grasps(const TriMesh& posed_mesh, const SampleBoxSpec& spec,
                                          const GripperSpec& gripper,
                                          const SamplerParams& params) {
  spec.validate();
  const Aabb obj = bounding_box(posed_mesh);
  const OccupancyGrid probe = build_probe(posed_mesh, params.voxel_h);
  const OccupancyGrid body_probe = build_probe(posed_mesh, params.body_probe_h);
  const GridSpec& ps = probe.spec();
  const double h = ps.resolution;
  const Vec3 org = ps.frame.translation;

  // per closing axis: occupied cell index range along that axis for every
  // (lateral, vertical) probe column
  struct Extremes {
    std::vector<int> lo, hi;
    int n_lat = 0, n_z = 0;
  };
  std::array<Extremes, 2> extremes;
  for (int axis = 0; axis < 2; ++axis) {
    const int lateral = 1 - axis;
    Extremes& e = extremes[axis];
    e.n_lat = (lateral == 0) ? ps.nx() : ps.ny();
    e.n_z = ps.nz();
    e.lo.assign(static_cast<std::size_t>(e.n_lat) * e.n_z, std::numeric_limits<int>::max());
    e.hi.assign(static_cast<std::size_t>(e.n_lat) * e.n_z, -1);
  }
  for (int k = 0; k < ps.nz(); ++k)
    for (int j = 0; j < ps.ny(); ++j)
      for (int i = 0; i < ps.nx(); ++i) {
        if (!probe.at(i, j, k)) continue;
        for (int axis = 0; axis < 2; ++axis) {
          Extremes& e = extremes[axis];
          const int lat = (axis == 0) ? j : i;
          const int along = (axis == 0) ? i : j;
          const std::size_t idx = static_cast<std::size_t>(lat) + static_cast<std::size_t>(e.n_lat) * k;
          e.lo[idx] = std::min(e.lo[idx], along);
          e.hi[idx] = std::max(e.hi[idx], along);
        }
      }

  struct Window {
    int axis, z_step, lateral_step;
    double lat0, z0;
  };
  std::vector<Window> windows;
  for (int axis = 0; axis < 2; ++axis) {
    const int lateral = 1 - axis;
    for (int iz = 0;; ++iz) {
      const double z0 = iz * spec.stride;
      if (z0 >= obj.max.z() - 1e-9) break;
      for (int il = 0;; ++il) {
        const double lat0 = obj.min[lateral] + il * spec.stride;
        if (lat0 >= obj.max[lateral] - 1e-9) break;
        windows.push_back({axis, iz, il, lat0, z0});
      }
    }
  }

  std::vector<std::optional<GraspCandidate>> slots(windows.size());
  parallel_for(0, static_cast<int>(windows.size()), [&](int wi) {
    const Window& w = windows[wi];
    const int lateral = 1 - w.axis;
    const Extremes& e = extremes[w.axis];

    // occupied extremes along the closing axis inside this footprint window
    const double lat_org = org[lateral];
    const int l0 = std::max(0, static_cast<int>(std::ceil((w.lat0 - lat_org) / h - 0.5)));
    const int l1 = std::min(e.n_lat - 1,
                            static_cast<int>(std::floor((w.lat0 + spec.length - lat_org) / h - 0.5)));
    const int k0 = std::max(0, static_cast<int>(std::ceil((w.z0 - org.z()) / h - 0.5)));
    const int k1 = std::min(e.n_z - 1,
                            static_cast<int>(std::floor((w.z0 + spec.width - org.z()) / h - 0.5)));
    int lo = std::numeric_limits<int>::max(), hi = -1;
    for (int k = k0; k <= k1; ++k)
      for (int l = l0; l <= l1; ++l) {
        const std::size_t idx = static_cast<std::size_t>(l) + static_cast<std::size_t>(e.n_lat) * k;
        lo = std::min(lo, e.lo[idx]);
        hi = std::max(hi, e.hi[idx]);
      }
    if (hi < 0) return;  // no object inside the footprint

    const double along_org = org[w.axis];
    const double tangent_lo = along_org + (lo + 0.5) * h - 0.5 * h;
    const double tangent_hi = along_org + (hi + 0.5) * h + 0.5 * h;

    GraspCandidate cand;
    cand.axis_index = w.axis;
    cand.z_step = w.z_step;
    cand.lateral_step = w.lateral_step;
    cand.closing_axis = (w.axis == 0) ? Vec3::UnitX() : Vec3::UnitY();
    cand.grasp_width = tangent_hi - tangent_lo;

    const Vec3 extents(spec.length, spec.width, spec.thickness);
    for (int side = 0; side < 2; ++side) {
      const Vec3 w_dir = (side == 0) ? cand.closing_axis : Vec3(-cand.closing_axis);
      const Vec3 u_dir = Vec3::UnitZ().cross(w_dir);
      RigidTransform frame;
      frame.rotation.col(0) = u_dir;
      frame.rotation.col(1) = Vec3::UnitZ();
      frame.rotation.col(2) = w_dir;
      const double tangent = (side == 0) ? tangent_lo : tangent_hi;
      Vec3 origin = Vec3::Zero();
      origin[w.axis] = (side == 0) ? tangent - (spec.thickness - spec.penetration)
                                   : tangent + (spec.thickness - spec.penetration);
      origin[lateral] = (u_dir[lateral] > 0.0) ? w.lat0 : w.lat0 + spec.length;
      origin.z() = w.z0;
      frame.translation = origin;
      cand.side_frames[side] = GridSpec(frame, extents, params.voxel_h);
    }

    FeasibilityResult fr = feasibility_with_probe(cand, posed_mesh, spec, gripper, body_probe);
    if (!fr.valid()) return;
    cand.contact_volume = fr.contact_volume;
    slots[static_cast<std::size_t>(wi)] = std::move(cand);
  });

  std::vector<GraspCandidate> accepted;
  for (auto& slot : slots)
    if (slot) accepted.push_back(std::move(*slot));

  if (static_cast<int>(accepted.size()) > params.max_candidates_per_pose) {
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const GraspCandidate& a, const GraspCandidate& b) {
                       return a.contact_volume > b.contact_volume;
                     });
    accepted.resize(static_cast<std::size_t>(params.max_candidates_per_pose));
    std::stable_sort(accepted.begin(), accepted.end(),
                     [](const GraspCandidate& a, const GraspCandidate& b) {
                       return std::tie(a.axis_index, a.z_step, a.lateral_step) <
                              std::tie(b.axis_index, b.z_step, b.lateral_step);
                     });
  }
  return accepted;
}

}  // namespace fcso
