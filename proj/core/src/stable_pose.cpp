#include "fcso/stable_pose.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "fcso/convex_hull.hpp"

namespace fcso {

namespace {

// Van Oosterom & Strackee: solid angle of triangle (a,b,c) seen from origin.
double triangle_solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double numerator = a.dot(b.cross(c));
  const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
  return std::abs(2.0 * std::atan2(numerator, denom));
}

struct MergedFacet {
  std::vector<int> faces;
  Vec3 normal = Vec3::Zero();  // area-weighted mean, unit
  double plane_offset = 0.0;
};

// Union-find over hull triangles: adjacent faces merge when normals agree
// within the angular tolerance and plane offsets within merge_offset.
std::vector<MergedFacet> merge_coplanar(const TriMesh& hull, const StablePoseParams& params) {
  const int n = static_cast<int>(hull.faces.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
  const double cos_tol = std::cos(params.merge_normal_deg * M_PI / 180.0);
  for (int f = 0; f < n; ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = hull.faces[f][e];
      const int b = hull.faces[f][(e + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_owner.find(key);
      if (it == edge_owner.end()) {
        edge_owner[key] = {f, e};
        continue;
      }
      const int g = it->second.first;
      const Vec3 nf = hull.face_normal(f);
      const Vec3 ng = hull.face_normal(g);
      if (nf.dot(ng) >= cos_tol) {
        const double off = std::abs(nf.dot(hull.v(f, 0)) - ng.dot(hull.v(g, 0)));
        if (off <= params.merge_offset) parent[find(f)] = find(g);
      }
    }
  }

  std::map<int, int> groups;
  std::vector<MergedFacet> out;
  for (int f = 0; f < n; ++f) {
    const int root = find(f);
    auto it = groups.find(root);
    if (it == groups.end()) {
      it = groups.emplace(root, static_cast<int>(out.size())).first;
      out.emplace_back();
    }
    MergedFacet& m = out[it->second];
    m.faces.push_back(f);
    m.normal += hull.face_area(f) * hull.face_normal(f);
  }
  for (auto& m : out) {
    m.normal.normalize();
    double offset = 0.0;
    for (int f : m.faces) offset += m.normal.dot(hull.v(f, 0));
    m.plane_offset = offset / static_cast<double>(m.faces.size());
  }
  return out;
}

// Signed distance from the projected COM to the boundary of the merged
// facet polygon, positive inside. Boundary edges are those used once.
double inside_margin(const TriMesh& hull, const MergedFacet& facet, const Vec3& com) {
  std::map<std::pair<int, int>, int> edge_use;
  for (int f : facet.faces)
    for (int e = 0; e < 3; ++e) {
      const int a = hull.faces[f][e];
      const int b = hull.faces[f][(e + 1) % 3];
      edge_use[std::minmax(a, b)] += 1;
    }

  const Vec3 p = com - facet.normal * (facet.normal.dot(com) - facet.plane_offset);
  double margin = std::numeric_limits<double>::infinity();
  bool found_boundary = false;
  for (int f : facet.faces)
    for (int e = 0; e < 3; ++e) {
      const int a = hull.faces[f][e];
      const int b = hull.faces[f][(e + 1) % 3];
      if (edge_use[std::minmax(a, b)] != 1) continue;
      found_boundary = true;
      const Vec3& va = hull.vertices[a];
      const Vec3& vb = hull.vertices[b];
      // inward edge normal within the facet plane
      const Vec3 inward = facet.normal.cross(vb - va).normalized();
      margin = std::min(margin, inward.dot(p - va));
    }
  return found_boundary ? margin : -std::numeric_limits<double>::infinity();
}

// Rotation taking unit vector `from` to unit vector `to` by the minimal arc.
Mat3 minimal_rotation(const Vec3& from, const Vec3& to) {
  const double c = from.dot(to);
  if (c > 1.0 - 1e-12) return Mat3::Identity();
  if (c < -1.0 + 1e-12) {
    // opposite: rotate pi around any axis orthogonal to `from`
    Vec3 axis = from.cross(Vec3::UnitX());
    if (axis.squaredNorm() < 1e-12) axis = from.cross(Vec3::UnitY());
    return Eigen::AngleAxisd(M_PI, axis.normalized()).toRotationMatrix();
  }
  const Vec3 axis = from.cross(to).normalized();
  return Eigen::AngleAxisd(std::acos(std::clamp(c, -1.0, 1.0)), axis).toRotationMatrix();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<StablePose> enumerate_stable_poses(const TriMesh& mesh,
                                               const StablePoseParams& params) {
  if (!is_watertight(mesh))
    throw std::runtime_error("enumerate_stable_poses: mesh not watertight");
  const Vec3 com = center_of_mass(mesh);
  const TriMesh hull = convex_hull(mesh);
  const std::vector<MergedFacet> facets = merge_coplanar(hull, params);

  struct Candidate {
    const MergedFacet* facet;
    double solid_angle;
  };
  std::vector<Candidate> stable;
  for (const auto& facet : facets) {
    if (inside_margin(hull, facet, com) < params.com_margin) continue;
    double omega = 0.0;
    for (int f : facet.faces)
      omega += triangle_solid_angle(hull.v(f, 0) - com, hull.v(f, 1) - com, hull.v(f, 2) - com);
    stable.push_back({&facet, omega});
  }

  double total = 0.0;
  for (const auto& c : stable) total += c.solid_angle;

  std::vector<StablePose> poses;
  poses.reserve(stable.size());
  for (const auto& c : stable) {
    StablePose pose;
    pose.support_facet = c.facet->faces;
    pose.probability = total > 0.0 ? c.solid_angle / total : 0.0;

    // support facet down, then rest on z=0 with the COM over the origin
    RigidTransform t;
    t.rotation = minimal_rotation(c.facet->normal, -Vec3::UnitZ());
    double min_z = std::numeric_limits<double>::infinity();
    for (const auto& v : mesh.vertices) min_z = std::min(min_z, (t.rotation * v).z());
    const Vec3 com_rot = t.rotation * com;
    t.translation = Vec3(-com_rot.x(), -com_rot.y(), -min_z);
    pose.transform = t;
    poses.push_back(std::move(pose));
  }

  std::stable_sort(poses.begin(), poses.end(), [](const StablePose& a, const StablePose& b) {
    return a.probability > b.probability;
  });
  return poses;
}

PoseSelection select_poses(const std::vector<StablePose>& poses, int count,
                           const PoseSelectionMode& mode) {
  if (count <= 0) throw std::invalid_argument("select_poses: count must be positive");
  if (count > static_cast<int>(poses.size()))
    throw std::runtime_error("select_poses: requested " + std::to_string(count) +
                             " poses but only " + std::to_string(poses.size()) + " available");

  PoseSelection out;
  if (mode.kind == PoseSelectionMode::manual) {
    if (static_cast<int>(mode.indices.size()) != count)
      throw std::invalid_argument("select_poses: manual index count does not match requested count");
    std::vector<int> sorted = mode.indices;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("select_poses: duplicate manual indices");
    for (int idx : mode.indices) {
      if (idx < 0 || idx >= static_cast<int>(poses.size()))
        throw std::out_of_range("select_poses: manual index " + std::to_string(idx) +
                                " out of range");
      out.indices.push_back(idx);
      out.poses.push_back(poses[idx]);
    }
    return out;
  }

  // partial Fisher-Yates with an engine-independent generator
  std::vector<int> order(poses.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t state = mode.seed;
  for (int i = 0; i < count; ++i) {
    state = splitmix64(state);
    const std::size_t span = order.size() - static_cast<std::size_t>(i);
    const std::size_t j = static_cast<std::size_t>(i) + state % span;
    std::swap(order[static_cast<std::size_t>(i)], order[j]);
  }
  order.resize(static_cast<std::size_t>(count));
  for (int idx : order) {
    out.indices.push_back(idx);
    out.poses.push_back(poses[idx]);
  }
  return out;
}

}  // namespace fcso
