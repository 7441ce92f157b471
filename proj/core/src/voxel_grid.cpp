#include "fcso/voxel_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "fcso/parallel.hpp"

namespace fcso {

GridSpec::GridSpec(const RigidTransform& frame_, const Vec3& extents_, double h)
    : frame(frame_), extents(extents_), resolution(h) {
  if (!(extents.array() > 0.0).all())
    throw std::invalid_argument("GridSpec: extents must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("GridSpec: resolution must be positive");
  for (int k = 0; k < 3; ++k) {
    counts_[k] = std::max(2, static_cast<int>(std::ceil(extents[k] / h - 1e-12)));
  }
}

bool GridSpec::same_lattice(const GridSpec& o) const {
  return counts_ == o.counts_ && resolution == o.resolution &&
         (extents - o.extents).cwiseAbs().maxCoeff() == 0.0;
}

bool GridSpec::operator==(const GridSpec& o) const {
  return same_lattice(o) &&
         (frame.rotation - o.frame.rotation).cwiseAbs().maxCoeff() == 0.0 &&
         (frame.translation - o.frame.translation).cwiseAbs().maxCoeff() == 0.0;
}

std::size_t OccupancyGrid::occupied_count() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells_) n += c;
  return n;
}

OccupancyGrid OccupancyGrid::rebased(const RigidTransform& new_frame) const {
  GridSpec s(new_frame, spec_.extents, spec_.resolution);
  OccupancyGrid out(s);
  out.cells() = cells_;
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct LocalTri {
  double ax, ay, az, bx, by, bz, cx, cy, cz;
};

// Crossings of the +z line through (u, v) with one triangle, box frame.
// Appends (height, +1 exit / -1 entry); returns false on a grazing
// configuration that needs a perturbed recast. Signed counting makes
// unions of overlapping closed shells come out right.
bool column_crossings(const LocalTri& t, double u, double v,
                      std::vector<std::pair<double, int>>& out) {
  const double w0 = (t.bx - u) * (t.cy - v) - (t.by - v) * (t.cx - u);
  const double w1 = (t.cx - u) * (t.ay - v) - (t.cy - v) * (t.ax - u);
  const double w2 = (t.ax - u) * (t.by - v) - (t.ay - v) * (t.bx - u);
  const double area2 = w0 + w1 + w2;

  const double ex0 = t.bx - t.ax, ey0 = t.by - t.ay;
  const double ex1 = t.cx - t.ax, ey1 = t.cy - t.ay;
  const double scale = std::sqrt((ex0 * ex0 + ey0 * ey0) * (ex1 * ex1 + ey1 * ey1));

  if (std::abs(area2) <= 1e-14 * std::max(scale, 1e-30)) {
    // projection is a sliver; grazing only if the column sits on it
    auto seg_dist2 = [&](double ax, double ay, double bx, double by) {
      const double ex = bx - ax, ey = by - ay;
      const double len2 = ex * ex + ey * ey;
      double s = len2 > 0.0 ? ((u - ax) * ex + (v - ay) * ey) / len2 : 0.0;
      s = std::clamp(s, 0.0, 1.0);
      const double dx = u - (ax + s * ex), dy = v - (ay + s * ey);
      return dx * dx + dy * dy;
    };
    const double d2 = std::min({seg_dist2(t.ax, t.ay, t.bx, t.by),
                                seg_dist2(t.bx, t.by, t.cx, t.cy),
                                seg_dist2(t.cx, t.cy, t.ax, t.ay)});
    return d2 > 1e-18;
  }

  const double inv = 1.0 / area2;
  const double l0 = w0 * inv, l1 = w1 * inv, l2 = w2 * inv;
  constexpr double kEdgeTol = 1e-10;
  if (l0 < -kEdgeTol || l1 < -kEdgeTol || l2 < -kEdgeTol) return true;  // miss
  if (l0 < kEdgeTol || l1 < kEdgeTol || l2 < kEdgeTol) return false;    // edge graze
  out.emplace_back(l0 * t.az + l1 * t.bz + l2 * t.cz, area2 > 0.0 ? +1 : -1);
  return true;
}

}  // namespace

OccupancyGrid voxelize(const TriMesh& world_mesh, const GridSpec& spec) {
  if (!is_watertight(world_mesh))
    throw std::runtime_error("voxelize: mesh not watertight");

  // triangles in box coordinates
  const RigidTransform to_box = spec.frame.inverse();
  const std::size_t ntri = world_mesh.faces.size();
  std::vector<LocalTri> tris(ntri);
  for (std::size_t f = 0; f < ntri; ++f) {
    const Vec3 a = to_box.apply(world_mesh.v(static_cast<int>(f), 0));
    const Vec3 b = to_box.apply(world_mesh.v(static_cast<int>(f), 1));
    const Vec3 c = to_box.apply(world_mesh.v(static_cast<int>(f), 2));
    tris[f] = {a.x(), a.y(), a.z(), b.x(), b.y(), b.z(), c.x(), c.y(), c.z()};
  }

  const int nx = spec.nx(), ny = spec.ny(), nz = spec.nz();
  const double h = spec.resolution;

  // bin triangles over columns
  std::vector<std::vector<int>> bins(static_cast<std::size_t>(nx) * ny);
  for (std::size_t f = 0; f < ntri; ++f) {
    const LocalTri& t = tris[f];
    const double ulo = std::min({t.ax, t.bx, t.cx}), uhi = std::max({t.ax, t.bx, t.cx});
    const double vlo = std::min({t.ay, t.by, t.cy}), vhi = std::max({t.ay, t.by, t.cy});
    const int i0 = std::max(0, static_cast<int>(std::floor(ulo / h - 0.5)));
    const int i1 = std::min(nx - 1, static_cast<int>(std::ceil(uhi / h - 0.5)) + 1);
    const int j0 = std::max(0, static_cast<int>(std::floor(vlo / h - 0.5)));
    const int j1 = std::min(ny - 1, static_cast<int>(std::ceil(vhi / h - 0.5)) + 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        bins[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j].push_back(
            static_cast<int>(f));
  }

  OccupancyGrid grid(spec);
  auto* cells = grid.cells().data();

  // cells whose centers overhang the extents (ceil rounding) stay empty
  const bool overhang_x = (nx - 0.5) * h > spec.extents.x() + 1e-12;
  const bool overhang_y = (ny - 0.5) * h > spec.extents.y() + 1e-12;
  const int kz_limit = [&] {
    int k = nz;
    while (k > 0 && (k - 0.5) * h > spec.extents.z() + 1e-12) --k;
    return k;
  }();

  parallel_for(0, nx * ny, [&](int col) {
    const int i = col % nx;
    const int j = col / nx;
    if (overhang_x && (i + 0.5) * h > spec.extents.x() + 1e-12) return;
    if (overhang_y && (j + 0.5) * h > spec.extents.y() + 1e-12) return;
    const auto& bin = bins[static_cast<std::size_t>(col)];
    if (bin.empty()) return;

    std::vector<std::pair<double, int>> crossings;
    for (int attempt = 0; attempt < 16; ++attempt) {
      crossings.clear();
      double u = (i + 0.5) * h;
      double v = (j + 0.5) * h;
      if (attempt > 0) {
        const std::uint64_t s =
            splitmix64((static_cast<std::uint64_t>(col) << 8) | static_cast<unsigned>(attempt));
        u += h * 1e-6 * (1.0 + static_cast<double>(s & 0xff) / 255.0);
        v += h * 1e-6 * (1.0 + static_cast<double>((s >> 8) & 0xff) / 255.0);
      }
      bool clean = true;
      for (int f : bin) {
        if (!column_crossings(tris[static_cast<std::size_t>(f)], u, v, crossings)) {
          clean = false;
          break;
        }
      }
      if (!clean) continue;
      std::sort(crossings.begin(), crossings.end());
      int balance = 0;
      for (const auto& [t, sign] : crossings) balance += sign;
      if (balance != 0) continue;  // inconsistent crossing set, recast

      // winding number between consecutive crossings; the solid is where it
      // stays positive, and boundary cells within 1e-9 count as inside
      int winding = 0;
      std::size_t s = 0;
      while (s < crossings.size()) {
        while (s < crossings.size() && winding <= 0) winding -= crossings[s++].second;
        if (winding <= 0) break;
        const double enter = crossings[s - 1].first - 1e-9;
        while (s < crossings.size() && winding > 0) winding -= crossings[s++].second;
        const double exit = crossings[s - 1].first + 1e-9;
        int k0 = std::max(0, static_cast<int>(std::ceil(enter / h - 0.5)));
        int k1 = std::min(kz_limit - 1, static_cast<int>(std::floor(exit / h - 0.5)));
        for (int k = k0; k <= k1; ++k)
          cells[grid.index(i, j, k)] = 1;
      }
      return;
    }
    throw std::runtime_error("voxelize: crossing classification did not stabilize for a column");
  });

  return grid;
}

OccupancyGrid grid_bool(const OccupancyGrid& a, const OccupancyGrid& b, BoolOp op) {
  if (!(a.spec() == b.spec()))
    throw std::invalid_argument("grid_bool: operand GridSpecs differ");
  OccupancyGrid out(a.spec());
  const auto& ca = a.cells();
  const auto& cb = b.cells();
  auto& co = out.cells();
  switch (op) {
    case BoolOp::unite:
      for (std::size_t i = 0; i < ca.size(); ++i) co[i] = ca[i] | cb[i];
      break;
    case BoolOp::intersect:
      for (std::size_t i = 0; i < ca.size(); ++i) co[i] = ca[i] & cb[i];
      break;
    case BoolOp::subtract:
      for (std::size_t i = 0; i < ca.size(); ++i) co[i] = ca[i] & static_cast<std::uint8_t>(!cb[i]);
      break;
  }
  return out;
}

double grid_volume(const OccupancyGrid& g) {
  const double h = g.spec().resolution;
  return static_cast<double>(g.occupied_count()) * h * h * h;
}

OccupiedBox occupied_aabb(const OccupancyGrid& g) {
  const GridSpec& s = g.spec();
  int i0 = s.nx(), i1 = -1, j0 = s.ny(), j1 = -1, k0 = s.nz(), k1 = -1;
  for (int k = 0; k < s.nz(); ++k)
    for (int j = 0; j < s.ny(); ++j)
      for (int i = 0; i < s.nx(); ++i)
        if (g.at(i, j, k)) {
          i0 = std::min(i0, i); i1 = std::max(i1, i);
          j0 = std::min(j0, j); j1 = std::max(j1, j);
          k0 = std::min(k0, k); k1 = std::max(k1, k);
        }
  if (i1 < 0) throw std::runtime_error("occupied_aabb: empty grid");
  const double h = s.resolution;
  OccupiedBox out;
  out.box.min = Vec3(i0 * h, j0 * h, k0 * h);
  out.box.max = Vec3((i1 + 1) * h, (j1 + 1) * h, (k1 + 1) * h);
  out.volume = out.box.volume();
  out.index_range = {i0, i1, j0, j1, k0, k1};
  return out;
}

std::string dump_rle(const OccupancyGrid& g) {
  const GridSpec& s = g.spec();
  std::ostringstream out;
  char buf[256];
  out << "fcso-grid v1\n";
  std::snprintf(buf, sizeof(buf), "dims %d %d %d\n", s.nx(), s.ny(), s.nz());
  out << buf;
  std::snprintf(buf, sizeof(buf), "h %.17g\n", s.resolution);
  out << buf;
  std::snprintf(buf, sizeof(buf), "extents %.17g %.17g %.17g\n", s.extents.x(), s.extents.y(),
                s.extents.z());
  out << buf;
  out << "frame";
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      std::snprintf(buf, sizeof(buf), " %.17g", s.frame.rotation(r, c));
      out << buf;
    }
  for (int r = 0; r < 3; ++r) {
    std::snprintf(buf, sizeof(buf), " %.17g", s.frame.translation[r]);
    out << buf;
  }
  out << "\ndata\n";
  const auto& cells = g.cells();
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j] == cells[i]) ++j;
    out << (j - i) << ' ' << static_cast<int>(cells[i]) << '\n';
    i = j;
  }
  out << "end\n";
  return out.str();
}

OccupancyGrid parse_rle(const std::string& text) {
  std::istringstream in(text);
  std::string word, version;
  in >> word >> version;
  if (word != "fcso-grid" || version != "v1")
    throw std::runtime_error("parse_rle: not a fcso-grid v1 dump");
  int nx, ny, nz;
  double h;
  Vec3 extents;
  RigidTransform frame;
  in >> word >> nx >> ny >> nz;
  if (word != "dims") throw std::runtime_error("parse_rle: missing dims");
  in >> word >> h;
  if (word != "h") throw std::runtime_error("parse_rle: missing h");
  in >> word >> extents.x() >> extents.y() >> extents.z();
  if (word != "extents") throw std::runtime_error("parse_rle: missing extents");
  in >> word;
  if (word != "frame") throw std::runtime_error("parse_rle: missing frame");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) in >> frame.rotation(r, c);
  for (int r = 0; r < 3; ++r) in >> frame.translation[r];
  in >> word;
  if (word != "data") throw std::runtime_error("parse_rle: missing data");

  GridSpec spec(frame, extents, h);
  if (spec.nx() != nx || spec.ny() != ny || spec.nz() != nz)
    throw std::runtime_error("parse_rle: dims do not match extents/resolution");
  OccupancyGrid grid(spec);
  auto& cells = grid.cells();
  std::size_t pos = 0;
  for (;;) {
    in >> word;
    if (word == "end") break;
    if (!in) throw std::runtime_error("parse_rle: truncated data");
    const std::size_t run = std::stoull(word);
    int value;
    in >> value;
    if (pos + run > cells.size()) throw std::runtime_error("parse_rle: run overflows grid");
    std::fill(cells.begin() + pos, cells.begin() + pos + run,
              static_cast<std::uint8_t>(value != 0));
    pos += run;
  }
  if (pos != cells.size()) throw std::runtime_error("parse_rle: data does not cover grid");
  return grid;
}

}  // namespace fcso
