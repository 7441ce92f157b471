#include "fcso/surface_extract.hpp"

#include <unordered_map>

namespace fcso {

namespace {

// Kuhn subdivision of the unit cube into six tetrahedra around the main
// diagonal. Copies tile space consistently, so tetrahedra of adjacent cubes
// share faces exactly and the isosurface closes.
constexpr int kTetCorners[6][4] = {
    {0, 1, 3, 7}, {0, 3, 2, 7}, {0, 2, 6, 7}, {0, 6, 4, 7}, {0, 4, 5, 7}, {0, 5, 1, 7}};

struct VertexWelder {
  std::unordered_map<std::uint64_t, int> map;
  TriMesh* mesh;

  int midpoint(std::uint64_t id_a, std::uint64_t id_b, const Vec3& pa, const Vec3& pb) {
    if (id_a > id_b) return midpoint(id_b, id_a, pb, pa);
    const std::uint64_t key = (id_a << 32) | id_b;
    auto it = map.find(key);
    if (it != map.end()) return it->second;
    const int idx = static_cast<int>(mesh->vertices.size());
    mesh->vertices.push_back(0.5 * (pa + pb));
    map.emplace(key, idx);
    return idx;
  }
};

}  // namespace

TriMesh extract_surface(const OccupancyGrid& g) {
  const GridSpec& spec = g.spec();
  if (g.empty()) throw std::runtime_error("extract_surface: empty grid");

  // lattice of cell centers plus one empty ghost layer per side
  const int lx = spec.nx() + 2, ly = spec.ny() + 2, lz = spec.nz() + 2;
  const double h = spec.resolution;
  auto value = [&](int i, int j, int k) -> bool {
    if (i < 1 || j < 1 || k < 1 || i > spec.nx() || j > spec.ny() || k > spec.nz()) return false;
    return g.at(i - 1, j - 1, k - 1);
  };
  auto position = [&](int i, int j, int k) {
    return Vec3((i - 0.5) * h, (j - 0.5) * h, (k - 0.5) * h);
  };
  auto lattice_id = [&](int i, int j, int k) -> std::uint64_t {
    return static_cast<std::uint64_t>(i) +
           static_cast<std::uint64_t>(lx) * (static_cast<std::uint64_t>(j) +
                                             static_cast<std::uint64_t>(ly) * k);
  };

  TriMesh out;
  VertexWelder weld{{}, &out};
  weld.map.reserve(static_cast<std::size_t>(spec.cell_count() / 4 + 64));

  std::array<Vec3, 8> corner_pos;
  std::array<std::uint64_t, 8> corner_id;
  std::array<bool, 8> corner_in;

  auto emit = [&](int i0, int i1, int i2, const Vec3& inside_to_outside) {
    const Vec3 n = (out.vertices[i1] - out.vertices[i0])
                       .cross(out.vertices[i2] - out.vertices[i0]);
    if (n.dot(inside_to_outside) >= 0.0)
      out.faces.push_back({i0, i1, i2});
    else
      out.faces.push_back({i0, i2, i1});
  };

  for (int k = 0; k + 1 < lz; ++k)
    for (int j = 0; j + 1 < ly; ++j)
      for (int i = 0; i + 1 < lx; ++i) {
        int occupied = 0;
        for (int c = 0; c < 8; ++c) {
          const int ci = i + (c & 1), cj = j + ((c >> 1) & 1), ck = k + ((c >> 2) & 1);
          corner_in[c] = value(ci, cj, ck);
          occupied += corner_in[c];
          corner_pos[c] = position(ci, cj, ck);
          corner_id[c] = lattice_id(ci, cj, ck);
        }
        if (occupied == 0 || occupied == 8) continue;

        for (const auto& tet : kTetCorners) {
          int in_corners[4], out_corners[4];
          int nin = 0, nout = 0;
          for (int c : tet) {
            if (corner_in[c])
              in_corners[nin++] = c;
            else
              out_corners[nout++] = c;
          }
          if (nin == 0 || nin == 4) continue;

          Vec3 avg_in = Vec3::Zero(), avg_out = Vec3::Zero();
          for (int c = 0; c < nin; ++c) avg_in += corner_pos[in_corners[c]];
          for (int c = 0; c < nout; ++c) avg_out += corner_pos[out_corners[c]];
          const Vec3 dir = avg_out / nout - avg_in / nin;

          auto mid = [&](int a, int b) {
            return weld.midpoint(corner_id[a], corner_id[b], corner_pos[a], corner_pos[b]);
          };

          if (nin == 1) {
            const int a = in_corners[0];
            emit(mid(a, out_corners[0]), mid(a, out_corners[1]), mid(a, out_corners[2]), dir);
          } else if (nin == 3) {
            const int d = out_corners[0];
            emit(mid(in_corners[0], d), mid(in_corners[1], d), mid(in_corners[2], d), dir);
          } else {
            // two in, two out: planar parallelogram of edge midpoints
            const int a = in_corners[0], b = in_corners[1];
            const int c = out_corners[0], d = out_corners[1];
            const int mac = mid(a, c), mad = mid(a, d), mbc = mid(b, c), mbd = mid(b, d);
            emit(mac, mad, mbd, dir);
            emit(mac, mbd, mbc, dir);
          }
        }
      }

  // vertices were built in box coordinates; place into the world
  if ((spec.frame.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() != 0.0 ||
      spec.frame.translation.cwiseAbs().maxCoeff() != 0.0) {
    for (auto& v : out.vertices) v = spec.frame.apply(v);
  }
  return out;
}

}  // namespace fcso
