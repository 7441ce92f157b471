#include "fcso/pad_synth.hpp"

#include <algorithm>
#include <cmath>

#include "fcso/surface_extract.hpp"

namespace fcso {

GeometryRecord extract_intersection(const TriMesh& posed_mesh, const GridSpec& side_frame) {
  GeometryRecord rec{voxelize(posed_mesh, side_frame).rebased(RigidTransform::identity())};
  if (rec.grid.empty())
    throw std::runtime_error(
        "extract_intersection: object does not reach the sample box (infeasible candidate)");
  rec.intersection_volume = grid_volume(rec.grid);
  const OccupiedBox ob = occupied_aabb(rec.grid);
  rec.bounding_volume = ob.volume;
  rec.volume_ratio = (ob.volume - rec.intersection_volume) / ob.volume;

  // object surface inside the box, in box coordinates
  const RigidTransform to_box = side_frame.frame.inverse();
  const Vec3& extents = side_frame.extents;
  for (std::size_t f = 0; f < posed_mesh.faces.size(); ++f) {
    const Vec3 a = to_box.apply(posed_mesh.v(static_cast<int>(f), 0));
    const Vec3 b = to_box.apply(posed_mesh.v(static_cast<int>(f), 1));
    const Vec3 c = to_box.apply(posed_mesh.v(static_cast<int>(f), 2));
    const Vec3 centroid = (a + b + c) / 3.0;
    if ((centroid.array() < 0.0).any() || (centroid.array() > extents.array()).any()) continue;
    const int base = static_cast<int>(rec.surface_patch.vertices.size());
    rec.surface_patch.vertices.insert(rec.surface_patch.vertices.end(), {a, b, c});
    rec.surface_patch.faces.push_back({base, base + 1, base + 2});
  }
  return rec;
}

double depth_of_interest(const OccupancyGrid& grid, double penetration_depth) {
  const OccupiedBox ob = occupied_aabb(grid);
  const auto [i0, i1, j0, j1, k0, k1] = ob.index_range;
  const double h = grid.spec().resolution;

  auto layer_full = [&](int k) {
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (!grid.at(i, j, k)) return false;
    return true;
  };

  // deepest run of fully-occupied cross sections
  int first_enclosing = k1 + 1;
  for (int k = k1; k >= k0; --k) {
    if (!layer_full(k)) break;
    first_enclosing = k;
  }
  if (first_enclosing > k1) return penetration_depth;   // never encloses
  if (first_enclosing == k1 && k1 > k0) return penetration_depth;  // only at full depth
  const double d = (first_enclosing - k0) * h;
  return std::clamp(d, 0.0, penetration_depth);
}

std::vector<NormalCluster> cluster_normals(const TriMesh& surface, double tol_deg) {
  if (surface.empty()) throw std::invalid_argument("cluster_normals: empty surface");
  const double cos_tol = std::cos(tol_deg * M_PI / 180.0);

  struct Accum {
    Vec3 weighted_sum = Vec3::Zero();
    double area = 0.0;
  };
  std::vector<Accum> clusters;
  for (std::size_t f = 0; f < surface.faces.size(); ++f) {
    const double area = surface.face_area(f);
    if (area <= 0.0) continue;
    const Vec3 n = surface.face_normal(f);
    bool placed = false;
    for (auto& c : clusters) {
      if (n.dot(c.weighted_sum.normalized()) >= cos_tol) {
        c.weighted_sum += area * n;
        c.area += area;
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({area * n, area});
  }

  std::vector<NormalCluster> out;
  out.reserve(clusters.size());
  for (const auto& c : clusters) out.push_back({c.weighted_sum.normalized(), c.area});
  std::stable_sort(out.begin(), out.end(),
                   [](const NormalCluster& a, const NormalCluster& b) { return a.area > b.area; });
  return out;
}

GeometryLabel classify_geometry(GeometryRecord& rec, const FilterParams& params,
                                double penetration_depth) {
  const double h = rec.grid.spec().resolution;
  if (rec.depth_of_interest < penetration_depth - 0.5 * h) {
    rec.route = FilterRoute::volume_ratio;
    rec.label = rec.volume_ratio >= params.volume_ratio_threshold ? GeometryLabel::good
                                                                  : GeometryLabel::bad;
    return rec.label;
  }

  // d_n = D: the ratio is not meaningful, fall back to the normal clusters.
  // A flat-dominated intersection has its largest cluster along the closing
  // axis (w = local z of the canonical frame).
  rec.route = FilterRoute::normal_cluster;
  const auto clusters =
      cluster_normals(rec.surface_patch.empty() ? extract_surface(rec.grid) : rec.surface_patch,
                      params.cluster_tol_deg);
  const double cos_perp = std::cos(params.perp_tol_deg * M_PI / 180.0);
  const bool flat_dominated = std::abs(clusters.front().mean_direction.z()) >= cos_perp;
  rec.label = flat_dominated ? GeometryLabel::bad : GeometryLabel::good;
  return rec.label;
}

PadGeometry synthesize_pad(const std::vector<GeometryRecord>& records,
                           const FilterParams& params, const SampleBoxSpec& spec) {
  if (records.empty()) throw std::invalid_argument("synthesize_pad: no geometry records");
  const GridSpec lattice = records.front().grid.spec();
  for (const auto& r : records)
    if (!(r.grid.spec() == lattice))
      throw std::invalid_argument("synthesize_pad: records use different grids");

  std::vector<const GeometryRecord*> good;
  for (const auto& r : records)
    if (r.label == GeometryLabel::good) good.push_back(&r);

  PadGeometry pad{OccupancyGrid(lattice), {}, PadCase::all_good, 0.0, 0};
  pad.geometry_count = static_cast<int>(records.size());
  const double h = lattice.resolution;
  const double thickness = spec.thickness;

  if (good.empty()) {
    // flat fingerpad of thickness T - D on the outer (mounting) side
    pad.pad_case = PadCase::all_bad;
    const double slab = thickness - spec.penetration;
    for (int k = 0; k < lattice.nz(); ++k) {
      if ((k + 0.5) * h >= slab) break;
      for (int j = 0; j < lattice.ny(); ++j)
        for (int i = 0; i < lattice.nx(); ++i) pad.grid.set(i, j, k, true);
    }
  } else {
    OccupancyGrid removed(lattice);
    for (const auto* r : good) removed = grid_bool(removed, r->grid, BoolOp::unite);

    if (good.size() < records.size()) {
      pad.pad_case = PadCase::mixed;
      double min_depth = std::numeric_limits<double>::infinity();
      for (const auto* r : good) min_depth = std::min(min_depth, r->depth_of_interest);
      pad.block_depth = std::min(min_depth * params.flatness_gain, spec.penetration);
      // full-footprint block of depth d_B measured from the inner face
      const double block_from = thickness - pad.block_depth;
      for (int k = lattice.nz() - 1; k >= 0; --k) {
        if ((k + 0.5) * h <= block_from) break;
        for (int j = 0; j < lattice.ny(); ++j)
          for (int i = 0; i < lattice.nx(); ++i) removed.set(i, j, k, true);
      }
    } else {
      pad.pad_case = PadCase::all_good;
    }

    pad.grid = grid_bool(OccupancyGrid(lattice, true), removed, BoolOp::subtract);
  }

  pad.mesh = extract_surface(pad.grid);
  return pad;
}

long long count_combinations(const std::vector<int>& per_pose_counts) {
  if (per_pose_counts.empty())
    throw std::invalid_argument("count_combinations: no poses");
  long long product = 1;
  for (std::size_t m = 0; m < per_pose_counts.size(); ++m) {
    if (per_pose_counts[m] <= 0)
      throw std::runtime_error("count_combinations: pose " + std::to_string(m + 1) +
                               " has no feasible grasp");
    if (product > std::numeric_limits<long long>::max() / per_pose_counts[m])
      throw std::overflow_error("count_combinations: combination count overflows");
    product *= per_pose_counts[m];
  }
  return product;
}

}  // namespace fcso
