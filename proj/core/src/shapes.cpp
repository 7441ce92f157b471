#include "fcso/shapes.hpp"

#include <cmath>
#include <map>

#include "fcso/surface_extract.hpp"
#include "fcso/voxel_grid.hpp"

namespace fcso {

TriMesh make_box(const Vec3& extents, const Vec3& origin) {
  TriMesh m;
  for (int c = 0; c < 8; ++c) {
    m.vertices.emplace_back(origin.x() + ((c & 1) ? extents.x() : 0.0),
                            origin.y() + ((c & 2) ? extents.y() : 0.0),
                            origin.z() + ((c & 4) ? extents.z() : 0.0));
  }
  // two triangles per face, outward winding
  constexpr int quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                               {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriMesh make_icosphere(double radius, const Vec3& center, int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(verts.size());
      verts.push_back((verts[a] + verts[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriMesh m;
  m.vertices.reserve(verts.size());
  for (const auto& v : verts) m.vertices.push_back(center + radius * v);
  m.faces = std::move(faces);
  return m;
}

TriMesh make_ellipsoid(const Vec3& semi_axes, const Vec3& center, int subdivisions) {
  TriMesh m = make_icosphere(1.0, Vec3::Zero(), subdivisions);
  for (auto& v : m.vertices) v = center + v.cwiseProduct(semi_axes);
  return m;
}

TriMesh make_flat_finger(double pad_l, double pad_w, double depth) {
  return make_box(Vec3(depth, pad_l, pad_w), Vec3(-depth, -pad_l / 2.0, -pad_w / 2.0));
}

TriMesh make_bunny_figurine(int subdivisions) {
  // ribbed body: the radial ripple leaves graspable pockets on the flanks
  TriMesh body = make_ellipsoid(Vec3(20, 16, 19), Vec3(0, 0, 19), subdivisions);
  for (auto& v : body.vertices) {
    const double ripple = 1.0 + 0.055 * std::sin(0.95 * (v.z() - 19.0));
    v.x() *= ripple;
    v.y() *= ripple;
  }

  TriMesh mesh = std::move(body);
  mesh = concatenate(mesh, make_ellipsoid(Vec3(11, 10, 11), Vec3(13, 2, 43), subdivisions));
  mesh = concatenate(mesh, make_ellipsoid(Vec3(4.5, 4.5, 12), Vec3(10, -5.5, 56), subdivisions));
  mesh = concatenate(mesh, make_ellipsoid(Vec3(4.5, 4.5, 11), Vec3(11, 6, 55), subdivisions));
  mesh = concatenate(mesh, make_icosphere(7.0, Vec3(-18, 0, 22), subdivisions));
  mesh = concatenate(mesh, make_box(Vec3(30, 22, 7), Vec3(-15, -11, 0)));   // flat base
  mesh = concatenate(mesh, make_box(Vec3(7, 18, 22), Vec3(-24, -9, 12)));   // flat back
  return mesh;
}

}  // namespace fcso
