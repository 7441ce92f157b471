#include <benchmark/benchmark.h>

#include <random>

#include "fcso/convex_hull.hpp"
#include "fcso/grasp_quality.hpp"
#include "fcso/shapes.hpp"
#include "fcso/stl_io.hpp"
#include "fcso/surface_extract.hpp"
#include "fcso/voxel_grid.hpp"

using namespace fcso;

namespace {

const TriMesh& figurine() {
  static const TriMesh mesh = make_bunny_figurine();
  return mesh;
}

GridSpec sample_box(double h) {
  RigidTransform frame = RigidTransform::translate(Vec3(-10, -10, 20));
  return GridSpec(frame, Vec3(20, 20, 5), h);
}

}  // namespace

static void BM_VoxelizeSampleBox(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  const GridSpec spec = sample_box(h);
  for (auto _ : state) {
    benchmark::DoNotOptimize(voxelize(figurine(), spec));
  }
}
BENCHMARK(BM_VoxelizeSampleBox)->Arg(2)->Arg(4)->Arg(8);

static void BM_GridBoolean(benchmark::State& state) {
  const GridSpec spec(RigidTransform::identity(), Vec3(20, 20, 5), 0.25);
  std::mt19937 rng(1);
  std::bernoulli_distribution coin(0.4);
  OccupancyGrid a(spec), b(spec);
  for (auto& c : a.cells()) c = coin(rng);
  for (auto& c : b.cells()) c = coin(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_bool(a, b, BoolOp::unite));
  }
}
BENCHMARK(BM_GridBoolean);

static void BM_ExtractSurface(benchmark::State& state) {
  const GridSpec spec(RigidTransform::identity(), Vec3(20, 20, 5), 0.25);
  OccupancyGrid g(spec);
  for (int k = 0; k < spec.nz(); ++k)
    for (int j = 0; j < spec.ny(); ++j)
      for (int i = 0; i < spec.nx(); ++i) {
        const Vec3 c = spec.cell_center_local(i, j, k);
        if (c.z() < 1.0 + 2.0 * std::sin(c.x()) * std::sin(c.y())) g.set(i, j, k, true);
      }
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_surface(g));
  }
}
BENCHMARK(BM_ExtractSurface);

static void BM_Rles(benchmark::State& state) {
  std::mt19937 rng(7);
  std::normal_distribution<double> gauss;
  std::vector<Vec3> normals;
  while (static_cast<int>(normals.size()) < state.range(0)) {
    Vec3 v(gauss(rng), gauss(rng), gauss(rng));
    if (v.norm() > 1e-6) normals.push_back(v.normalized());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(rles(normals));
  }
}
BENCHMARK(BM_Rles)->Arg(32)->Arg(256)->Arg(2048);

static void BM_ConvexHull(benchmark::State& state) {
  std::mt19937 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<Vec3> points;
  for (int i = 0; i < state.range(0); ++i)
    points.emplace_back(gauss(rng), gauss(rng), gauss(rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(convex_hull(points));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConvexHull)->Range(1 << 8, 1 << 14)->Complexity();

static void BM_StlRoundTrip(benchmark::State& state) {
  const std::string bytes = save_stl(figurine(), StlFormat::binary);
  for (auto _ : state) {
    benchmark::DoNotOptimize(load_stl(bytes));
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(bytes.size()));
}
BENCHMARK(BM_StlRoundTrip);

BENCHMARK_MAIN();
