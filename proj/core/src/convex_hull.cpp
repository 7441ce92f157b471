#include "fcso/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace fcso {

namespace {

struct HullFace {
  std::array<int, 3> v;
  Vec3 normal;       // unit, outward
  double offset;     // normal . x = offset on the plane
  std::array<int, 3> neighbor{-1, -1, -1};  // across edge (v[k], v[k+1])
  std::vector<int> conflicts;
  bool alive = true;
};

struct Builder {
  const std::vector<Vec3>& pts;
  std::vector<HullFace> faces;
  double eps;

  explicit Builder(const std::vector<Vec3>& points) : pts(points) {
    Aabb box;
    for (const auto& p : points) box.expand(p);
    const double diag = box.empty() ? 1.0 : box.extents().norm();
    eps = std::max(1e-12, 1e-10 * std::max(diag, 1.0));
  }

  double dist(int f, int p) const { return faces[f].normal.dot(pts[p]) - faces[f].offset; }

  int add_face(int a, int b, int c) {
    HullFace f;
    f.v = {a, b, c};
    Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double len = n.norm();
    f.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    f.offset = f.normal.dot(pts[a]);
    faces.push_back(std::move(f));
    return static_cast<int>(faces.size()) - 1;
  }

  void link(int f, int edge, int g, int gedge) {
    faces[f].neighbor[edge] = g;
    faces[g].neighbor[gedge] = f;
  }

  bool init_simplex(std::array<int, 4>& simplex) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) return false;
    // farthest pair along the axis of largest spread
    int lo = 0, hi = 0;
    double best = -1.0;
    for (int axis = 0; axis < 3; ++axis) {
      int a = 0, b = 0;
      for (int i = 1; i < n; ++i) {
        if (pts[i][axis] < pts[a][axis]) a = i;
        if (pts[i][axis] > pts[b][axis]) b = i;
      }
      const double spread = pts[b][axis] - pts[a][axis];
      if (spread > best) {
        best = spread;
        lo = a;
        hi = b;
      }
    }
    if ((pts[hi] - pts[lo]).norm() <= eps) return false;

    const Vec3 dir = (pts[hi] - pts[lo]).normalized();
    int third = -1;
    double far2 = eps * eps;
    for (int i = 0; i < n; ++i) {
      const Vec3 d = pts[i] - pts[lo];
      const double off2 = (d - dir * dir.dot(d)).squaredNorm();
      if (off2 > far2) {
        far2 = off2;
        third = i;
      }
    }
    if (third < 0) return false;

    const Vec3 plane_n = (pts[hi] - pts[lo]).cross(pts[third] - pts[lo]).normalized();
    int fourth = -1;
    double far = eps;
    for (int i = 0; i < n; ++i) {
      const double off = std::abs(plane_n.dot(pts[i] - pts[lo]));
      if (off > far) {
        far = off;
        fourth = i;
      }
    }
    if (fourth < 0) return false;
    simplex = {lo, hi, third, fourth};
    return true;
  }

  void build() {
    std::array<int, 4> s;
    if (!init_simplex(s))
      throw std::invalid_argument("convex_hull: degenerate input (fewer than 4 affinely independent points)");

    // orient the simplex so every face points away from its opposite vertex
    if ((pts[s[1]] - pts[s[0]]).cross(pts[s[2]] - pts[s[0]]).dot(pts[s[3]] - pts[s[0]]) > 0.0)
      std::swap(s[1], s[2]);
    add_face(s[0], s[1], s[2]);
    add_face(s[0], s[3], s[1]);
    add_face(s[1], s[3], s[2]);
    add_face(s[2], s[3], s[0]);
    link(0, 0, 1, 2);
    link(0, 1, 2, 2);
    link(0, 2, 3, 2);
    link(1, 1, 2, 0);
    link(2, 1, 3, 0);
    link(3, 1, 1, 0);

    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      if (i == s[0] || i == s[1] || i == s[2] || i == s[3]) continue;
      for (int f = 0; f < 4; ++f) {
        if (dist(f, i) > eps) {
          faces[f].conflicts.push_back(i);
          break;
        }
      }
    }

    std::vector<int> pending;
    for (int f = 0; f < 4; ++f)
      if (!faces[f].conflicts.empty()) pending.push_back(f);

    while (!pending.empty()) {
      const int f = pending.back();
      pending.pop_back();
      if (!faces[f].alive || faces[f].conflicts.empty()) continue;

      int apex = -1;
      double far = -1.0;
      for (int p : faces[f].conflicts) {
        const double d = dist(f, p);
        if (d > far) {
          far = d;
          apex = p;
        }
      }
      if (apex < 0 || far <= eps) continue;

      // visible region around apex
      std::vector<int> visible{f};
      std::vector<char> seen(faces.size(), 0);
      seen[f] = 1;
      std::vector<std::pair<int, int>> horizon;  // (face, edge) on hidden side boundary
      for (std::size_t q = 0; q < visible.size(); ++q) {
        const int cur = visible[q];
        for (int e = 0; e < 3; ++e) {
          const int nb = faces[cur].neighbor[e];
          if (nb < 0) continue;
          if (seen[nb]) continue;
          if (dist(nb, apex) > eps) {
            seen[nb] = 1;
            visible.push_back(nb);
          } else {
            horizon.emplace_back(cur, e);
          }
        }
      }

      // orphaned conflict points from the visible region
      std::vector<int> orphans;
      for (int vf : visible) {
        for (int p : faces[vf].conflicts)
          if (p != apex) orphans.push_back(p);
        faces[vf].conflicts.clear();
        faces[vf].alive = false;
      }

      // fan of new faces over the horizon; stitch by shared directed edges
      std::unordered_map<std::uint64_t, std::pair<int, int>> open_edges;
      std::vector<int> created;
      for (const auto& [hf, he] : horizon) {
        const int a = faces[hf].v[he];
        const int b = faces[hf].v[(he + 1) % 3];
        const int nb = faces[hf].neighbor[he];
        const int nf = add_face(a, b, apex);
        created.push_back(nf);
        // reconnect across the horizon edge
        for (int e = 0; e < 3; ++e)
          if (faces[nb].neighbor[e] == hf) faces[nb].neighbor[e] = nf;
        faces[nf].neighbor[0] = nb;
        for (int e = 1; e < 3; ++e) {
          const int u = faces[nf].v[e];
          const int w = faces[nf].v[(e + 1) % 3];
          const std::uint64_t fwd = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
                                    static_cast<std::uint32_t>(w);
          const std::uint64_t rev = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(w)) << 32) |
                                    static_cast<std::uint32_t>(u);
          auto it = open_edges.find(rev);
          if (it != open_edges.end()) {
            link(nf, e, it->second.first, it->second.second);
            open_edges.erase(it);
          } else {
            open_edges[fwd] = {nf, e};
          }
        }
      }
      if (!open_edges.empty())
        throw std::runtime_error("convex_hull: horizon did not close (degenerate geometry)");

      for (int p : orphans) {
        for (int nf : created) {
          if (dist(nf, p) > eps) {
            faces[nf].conflicts.push_back(p);
            break;
          }
        }
      }
      for (int nf : created)
        if (!faces[nf].conflicts.empty()) pending.push_back(nf);
    }
  }

  TriMesh extract() const {
    TriMesh out;
    std::unordered_map<int, int> remap;
    for (const auto& f : faces) {
      if (!f.alive) continue;
      std::array<int, 3> tri;
      for (int k = 0; k < 3; ++k) {
        auto it = remap.find(f.v[k]);
        if (it == remap.end()) {
          it = remap.emplace(f.v[k], static_cast<int>(out.vertices.size())).first;
          out.vertices.push_back(pts[f.v[k]]);
        }
        tri[k] = it->second;
      }
      out.faces.push_back(tri);
    }
    return out;
  }
};

}  // namespace

TriMesh convex_hull(const std::vector<Vec3>& points) {
  Builder b(points);
  b.build();
  return b.extract();
}

}  // namespace fcso
