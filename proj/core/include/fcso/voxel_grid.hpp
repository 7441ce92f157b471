#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcso/trimesh.hpp"

namespace fcso {

/// Regular voxel lattice over a sample box. The frame maps box coordinates
/// (origin at the box corner, axes along the box edges) into the world.
/// Cell (i,j,k) is centered at ((i+0.5)h, (j+0.5)h, (k+0.5)h) in box
/// coordinates.
struct GridSpec {
  RigidTransform frame;
  Vec3 extents = Vec3::Zero();  // (L, W, T) in mm
  double resolution = 0.25;     // h, mm per voxel edge

  GridSpec() = default;
  GridSpec(const RigidTransform& frame_, const Vec3& extents_, double h);

  int nx() const { return counts_[0]; }
  int ny() const { return counts_[1]; }
  int nz() const { return counts_[2]; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2];
  }

  Vec3 cell_center_local(int i, int j, int k) const {
    const double h = resolution;
    return Vec3((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
  }
  Vec3 cell_center_world(int i, int j, int k) const {
    return frame.apply(cell_center_local(i, j, k));
  }

  bool same_lattice(const GridSpec& o) const;  // ignores the frame
  bool operator==(const GridSpec& o) const;

 private:
  std::array<int, 3> counts_{0, 0, 0};
};

class OccupancyGrid {
 public:
  OccupancyGrid() = default;  // zero-cell placeholder, assign before use
  explicit OccupancyGrid(const GridSpec& spec, bool fill = false)
      : spec_(spec), cells_(spec.cell_count(), fill ? 1 : 0) {}

  const GridSpec& spec() const { return spec_; }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(spec_.nx()) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(spec_.ny()) * k);
  }
  bool at(int i, int j, int k) const { return cells_[index(i, j, k)] != 0; }
  void set(int i, int j, int k, bool v) { cells_[index(i, j, k)] = v ? 1 : 0; }

  const std::vector<std::uint8_t>& cells() const { return cells_; }
  std::vector<std::uint8_t>& cells() { return cells_; }

  std::size_t occupied_count() const;
  bool empty() const { return occupied_count() == 0; }

  /// Same lattice, different placement. Pad synthesis uses this to pool
  /// grids extracted at different world locations into one canonical frame.
  OccupancyGrid rebased(const RigidTransform& new_frame) const;

 private:
  GridSpec spec_;
  std::vector<std::uint8_t> cells_;
};

/// Cell occupied iff its center is inside the mesh (ray-parity test with the
/// same tie-breaks as contains_points) and inside the box extents. The mesh
/// must be watertight.
OccupancyGrid voxelize(const TriMesh& world_mesh, const GridSpec& spec);

enum class BoolOp { unite, intersect, subtract };

/// Cellwise OR / AND / AND-NOT. Both grids must carry an identical GridSpec.
OccupancyGrid grid_bool(const OccupancyGrid& a, const OccupancyGrid& b, BoolOp op);

/// Occupied-cell count times h^3, in mm^3.
double grid_volume(const OccupancyGrid& g);

/// Tightest cell-boundary box (box frame) around the occupied cells.
struct OccupiedBox {
  Aabb box;                         // box-frame coordinates
  double volume = 0.0;              // V_B
  std::array<int, 6> index_range{}; // i0,i1,j0,j1,k0,k1 inclusive
};

/// Throws on an empty grid (callers treat that as an infeasible sample).
OccupiedBox occupied_aabb(const OccupancyGrid& g);

/// Plain-text run-length dump for fixtures and debugging; parse_rle inverts
/// it exactly. Format documented in the repository README.
std::string dump_rle(const OccupancyGrid& g);
OccupancyGrid parse_rle(const std::string& text);

}  // namespace fcso
