#include "fcso/mesh_query.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fcso {

namespace {

// Ericson, Real-Time Collision Detection, closest point on triangle.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return b + (c - b) * w;
  }

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double aabb_dist2(const Aabb& box, const Vec3& p) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double v = p[k];
    if (v < box.min[k]) d2 += (box.min[k] - v) * (box.min[k] - v);
    if (v > box.max[k]) d2 += (v - box.max[k]) * (v - box.max[k]);
  }
  return d2;
}

// t-range of line p + t*dir (t >= 0) inside the box; false when disjoint.
bool ray_hits_aabb(const Aabb& box, const Vec3& p, const Vec3& inv_dir) {
  double tmin = 0.0, tmax = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double t1 = (box.min[k] - p[k]) * inv_dir[k];
    const double t2 = (box.max[k] - p[k]) * inv_dir[k];
    tmin = std::max(tmin, std::min(t1, t2));
    tmax = std::min(tmax, std::max(t1, t2));
  }
  return tmax >= tmin;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic sequence of ray directions, far from any axis.
Vec3 probe_direction(int attempt) {
  if (attempt == 0) return Vec3(0.5421133814821, 0.6161399519823, 0.5714352979021).normalized();
  const std::uint64_t h = splitmix64(static_cast<std::uint64_t>(attempt));
  const double a = 0.1 + 0.8 * static_cast<double>(h & 0xffff) / 65535.0;
  const double b = 0.1 + 0.8 * static_cast<double>((h >> 16) & 0xffff) / 65535.0;
  const double c = 0.1 + 0.8 * static_cast<double>((h >> 32) & 0xffff) / 65535.0;
  return Vec3(a, b, c).normalized();
}

}  // namespace

TriangleBvh::TriangleBvh(const TriMesh& mesh) {
  const int n = static_cast<int>(mesh.faces.size());
  std::vector<Vec3> centroids(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  va_.resize(n);
  vb_.resize(n);
  vc_.resize(n);
  for (int i = 0; i < n; ++i) {
    va_[i] = mesh.v(i, 0);
    vb_[i] = mesh.v(i, 1);
    vc_[i] = mesh.v(i, 2);
    centroids[i] = (va_[i] + vb_[i] + vc_[i]) / 3.0;
  }
  if (n == 0) return;
  nodes_.reserve(static_cast<std::size_t>(2 * n));
  build(0, n, order, centroids);

  // reorder triangles to BVH order
  std::vector<Vec3> a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    a[i] = va_[order[i]];
    b[i] = vb_[order[i]];
    c[i] = vc_[order[i]];
  }
  va_ = std::move(a);
  vb_ = std::move(b);
  vc_ = std::move(c);
  tri_index_ = std::move(order);
  root_bounds_ = nodes_.empty() ? Aabb{} : nodes_[0].box;
}

int TriangleBvh::build(int begin, int end, std::vector<int>& order, std::vector<Vec3>& centroids) {
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  for (int i = begin; i < end; ++i) {
    const int t = order[i];
    box.expand(va_[t]);
    box.expand(vb_[t]);
    box.expand(vc_[t]);
  }
  nodes_[node_index].box = box;

  constexpr int kLeafSize = 8;
  if (end - begin <= kLeafSize) {
    nodes_[node_index].left = begin;
    nodes_[node_index].count = end - begin;
    return node_index;
  }

  Aabb cbox;
  for (int i = begin; i < end; ++i) cbox.expand(centroids[order[i]]);
  int axis = 0;
  const Vec3 e = cbox.extents();
  if (e.y() > e.x()) axis = 1;
  if (e.z() > e[axis]) axis = 2;
  const int mid = (begin + end) / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](int l, int r) { return centroids[l][axis] < centroids[r][axis]; });

  const int left = build(begin, mid, order, centroids);
  const int right = build(mid, end, order, centroids);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

int TriangleBvh::nearest_face(const Vec3& p, double* dist_out) const {
  if (nodes_.empty()) {
    if (dist_out) *dist_out = std::numeric_limits<double>::infinity();
    return -1;
  }
  double best2 = std::numeric_limits<double>::infinity();
  int best_tri = -1;
  // explicit stack ordered by child proximity
  std::vector<int> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& node = nodes_[ni];
    if (aabb_dist2(node.box, p) >= best2) continue;
    if (node.count > 0) {
      for (int i = node.left; i < node.left + node.count; ++i) {
        const double d2 = (closest_point_on_triangle(p, va_[i], vb_[i], vc_[i]) - p).squaredNorm();
        if (d2 < best2) {
          best2 = d2;
          best_tri = i;
        }
      }
    } else {
      const double dl = aabb_dist2(nodes_[node.left].box, p);
      const double dr = aabb_dist2(nodes_[node.right].box, p);
      if (dl < dr) {
        if (dr < best2) stack.push_back(node.right);
        if (dl < best2) stack.push_back(node.left);
      } else {
        if (dl < best2) stack.push_back(node.left);
        if (dr < best2) stack.push_back(node.right);
      }
    }
  }
  if (dist_out) *dist_out = std::sqrt(best2);
  return best_tri < 0 ? -1 : tri_index_[best_tri];
}

double TriangleBvh::distance(const Vec3& p) const {
  double d;
  nearest_face(p, &d);
  return d;
}

int TriangleBvh::winding_along(const Vec3& p, const Vec3& dir, double surface_tol) const {
  if (nodes_.empty()) return -1;
  const Vec3 inv_dir = dir.cwiseInverse();
  // signed crossing count ahead of p: entries (-1) minus exits (+1) leave
  // the winding number of p, so unions of overlapping closed shells work
  int winding = 0;
  std::vector<int> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const int ni = stack.back();
    stack.pop_back();
    const Node& node = nodes_[ni];
    if (!ray_hits_aabb(node.box, p, inv_dir)) continue;
    if (node.count == 0) {
      stack.push_back(node.left);
      stack.push_back(node.right);
      continue;
    }
    for (int i = node.left; i < node.left + node.count; ++i) {
      // Moller-Trumbore
      const Vec3 e1 = vb_[i] - va_[i];
      const Vec3 e2 = vc_[i] - va_[i];
      const Vec3 pv = dir.cross(e2);
      const double det = e1.dot(pv);
      const double scale = e1.norm() * e2.norm();
      if (std::abs(det) <= 1e-14 * std::max(scale, 1e-30)) {
        const Vec3 tv0 = p - va_[i];
        // parallel ray close to the triangle plane is a grazing case
        if (std::abs(tv0.dot(e1.cross(e2).normalized())) < 1e-9) return 0;
        continue;
      }
      const double inv_det = 1.0 / det;
      const Vec3 tv = p - va_[i];
      const double u = tv.dot(pv) * inv_det;
      const Vec3 qv = tv.cross(e1);
      const double v = dir.dot(qv) * inv_det;
      const double t = e2.dot(qv) * inv_det;
      constexpr double kBary = 1e-10;
      if (u < -kBary || v < -kBary || u + v > 1.0 + kBary) continue;
      if (t < -surface_tol) continue;
      if (std::abs(t) <= surface_tol) return +1;  // on the surface counts inside
      if (u < kBary || v < kBary || u + v > 1.0 - kBary) return 0;  // edge graze
      winding += det > 0.0 ? -1 : +1;
    }
  }
  return winding > 0 ? +1 : -1;
}

bool TriangleBvh::contains(const Vec3& p, double surface_tol) const {
  if (!p.allFinite()) return false;
  if (nodes_.empty() || !root_bounds_.contains(p, surface_tol)) return false;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const int r = winding_along(p, probe_direction(attempt), surface_tol);
    if (r != 0) return r > 0;
  }
  // pathological grazing from every probe direction; fall back to distance
  return distance(p) <= surface_tol;
}

std::vector<bool> contains_points(const TriMesh& mesh, const std::vector<Vec3>& points) {
  if (!is_watertight(mesh))
    throw std::runtime_error("contains_points: mesh not watertight");
  TriangleBvh bvh(mesh);
  std::vector<bool> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = bvh.contains(points[i]);
  return out;
}

}  // namespace fcso
