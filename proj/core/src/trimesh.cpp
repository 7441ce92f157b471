#include "fcso/trimesh.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace fcso {

Vec3 TriMesh::face_normal(std::size_t f) const {
  const auto& tri = faces[f];
  const Vec3 n = (vertices[tri[1]] - vertices[tri[0]])
                     .cross(vertices[tri[2]] - vertices[tri[0]]);
  const double len = n.norm();
  if (len <= 0.0) return Vec3::Zero();
  return n / len;
}

double TriMesh::face_area(std::size_t f) const {
  const auto& tri = faces[f];
  return 0.5 * (vertices[tri[1]] - vertices[tri[0]])
                   .cross(vertices[tri[2]] - vertices[tri[0]])
                   .norm();
}

Vec3 TriMesh::face_centroid(std::size_t f) const {
  const auto& tri = faces[f];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

namespace {

inline std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

int open_edge_count(const TriMesh& mesh) {
  // forward minus backward use count per undirected edge
  std::unordered_map<std::uint64_t, int> balance;
  balance.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      if (a < b)
        balance[edge_key(a, b)] += 1;
      else
        balance[edge_key(b, a)] -= 1;
    }
  }
  int open = 0;
  for (const auto& [key, bal] : balance) {
    (void)key;
    if (bal != 0) ++open;
  }
  return open;
}

bool is_watertight(const TriMesh& mesh) {
  return !mesh.empty() && open_edge_count(mesh) == 0;
}

double signed_volume(const TriMesh& mesh) {
  const int open = open_edge_count(mesh);
  if (mesh.empty() || open != 0) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "signed_volume: mesh not watertight (%d open edges)",
                  mesh.empty() ? -1 : open);
    throw std::runtime_error(buf);
  }
  double vol6 = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    vol6 += a.dot(b.cross(c));
  }
  return vol6 / 6.0;
}

Vec3 center_of_mass(const TriMesh& mesh) {
  const int open = open_edge_count(mesh);
  if (mesh.empty() || open != 0) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "center_of_mass: mesh not watertight (%d open edges)",
                  mesh.empty() ? -1 : open);
    throw std::runtime_error(buf);
  }
  // First moment of each tetrahedron (origin, a, b, c) is vol * (a+b+c)/4.
  double vol6 = 0.0;
  Vec3 moment = Vec3::Zero();
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    const Vec3& b = mesh.vertices[f[1]];
    const Vec3& c = mesh.vertices[f[2]];
    const double v = a.dot(b.cross(c));
    vol6 += v;
    moment += v * (a + b + c);
  }
  if (vol6 <= 0.0) throw std::runtime_error("center_of_mass: non-positive volume");
  return moment / (4.0 * vol6);
}

double surface_area(const TriMesh& mesh) {
  double area = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) area += mesh.face_area(f);
  return area;
}

Aabb bounding_box(const TriMesh& mesh) {
  Aabb box;
  for (const auto& p : mesh.vertices) box.expand(p);
  return box;
}

TriMesh apply_transform(const TriMesh& mesh, const RigidTransform& t) {
  if (!t.is_valid())
    throw std::invalid_argument("apply_transform: rotation is not orthonormal with det +1");
  TriMesh out;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& p : mesh.vertices) out.vertices.push_back(t.apply(p));
  out.faces = mesh.faces;
  return out;
}

TriMesh concatenate(const TriMesh& a, const TriMesh& b) {
  TriMesh out = a;
  const int offset = static_cast<int>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  out.faces.reserve(a.faces.size() + b.faces.size());
  for (const auto& f : b.faces)
    out.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  return out;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

TriMesh deduplicate_vertices(const TriMesh& mesh, double tol) {
  TriMesh out;
  out.vertices.reserve(mesh.vertices.size());
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::unordered_map<CellKey, std::vector<int>, CellKeyHash> bins;
  bins.reserve(mesh.vertices.size());

  const double inv = 1.0 / tol;
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& p = mesh.vertices[i];
    const CellKey base{static_cast<std::int64_t>(std::floor(p.x() * inv)),
                       static_cast<std::int64_t>(std::floor(p.y() * inv)),
                       static_cast<std::int64_t>(std::floor(p.z() * inv))};
    int found = -1;
    for (std::int64_t dx = -1; dx <= 1 && found < 0; ++dx)
      for (std::int64_t dy = -1; dy <= 1 && found < 0; ++dy)
        for (std::int64_t dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = bins.find({base.x + dx, base.y + dy, base.z + dz});
          if (it == bins.end()) continue;
          for (int j : it->second) {
            if ((out.vertices[j] - p).squaredNorm() <= tol2) {
              found = j;
              break;
            }
          }
        }
    if (found < 0) {
      found = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p);
      bins[base].push_back(found);
    }
    remap[i] = found;
  }

  out.faces.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) {
    const std::array<int, 3> g{remap[f[0]], remap[f[1]], remap[f[2]]};
    if (g[0] == g[1] || g[1] == g[2] || g[2] == g[0]) continue;  // collapsed
    out.faces.push_back(g);
  }
  return out;
}

}  // namespace fcso
