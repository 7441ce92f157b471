#pragma once

#include "fcso/voxel_grid.hpp"

namespace fcso {

/// Isosurface of the occupancy field at the 0.5 level, placed in the grid's
/// world frame. Surface vertices sit at midpoints between adjacent cell
/// centers; one empty ghost layer around the grid closes the surface exactly
/// at the box boundary. The mesh is watertight for any non-empty input.
/// Throws on an empty grid.
TriMesh extract_surface(const OccupancyGrid& g);

}  // namespace fcso
