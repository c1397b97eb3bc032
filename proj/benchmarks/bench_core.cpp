#include <benchmark/benchmark.h>

#include "bvdeg/adjugate.hpp"
#include "bvdeg/degree.hpp"
#include "bvdeg/distjac.hpp"
#include "bvdeg/gallery.hpp"
#include "bvdeg/variation.hpp"

using namespace bvdeg;

namespace {

GallerySpec named(const char* name) {
  GallerySpec s;
  s.name = name;
  return s;
}

void BM_AnisotropicTv(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<std::size_t> shape{n, n, n};
  const auto f = sample_gallery(named("cantor_shear3d"), shape);
  for (auto _ : state) benchmark::DoNotOptimize(anisotropic_tv(f));
}
BENCHMARK(BM_AnisotropicTv)->Arg(33)->Arg(65);

void BM_LevelSetProfile(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t shape[2] = {n, n};
  const double lo[2] = {0, 0}, hi[2] = {1, 1};
  const auto u = SampledMap::sample(Grid::spanning(shape, lo, hi), 1,
                                    [](auto x, auto y) { y[0] = std::floor(8.0 * x[0] * x[1]); });
  for (auto _ : state) benchmark::DoNotOptimize(level_set_profile(u).integral());
}
BENCHMARK(BM_LevelSetProfile)->Arg(64)->Arg(256);

void BM_DegreeIntegral(benchmark::State& state) {
  const auto g = make_gallery(named("zpow"));
  const auto pm = planar_map(g);
  const auto disk = PlanarRegion::disk({0, 0}, 0.8);
  const int raster = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(degree_integral(pm, disk, raster).signed_value);
}
BENCHMARK(BM_DegreeIntegral)->Arg(64)->Arg(256);

void BM_TopologicalDegree(benchmark::State& state) {
  const auto g = make_gallery(named("radial_stretch"));
  const auto pm = planar_map(g);
  const auto disk = PlanarRegion::disk({0.05, 0.02}, 0.6);
  for (auto _ : state) benchmark::DoNotOptimize(topological_degree(pm, disk, {0.1, 0.1}));
}
BENCHMARK(BM_TopologicalDegree);

void BM_DistributionalJacobian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<std::size_t> shape{n, n};
  const auto g = sample_gallery(named("zpow"), shape);
  const auto phi = TestFunction::disk_cutoff({0, 0}, 0.8, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(distributional_jacobian(g, phi));
}
BENCHMARK(BM_DistributionalJacobian)->Arg(128)->Arg(512);

void BM_Adjugate(benchmark::State& state) {
  const std::vector<std::size_t> shape{82, 41, 41};
  const auto f = sample_gallery(named("cantor_shear3d"), shape);
  AdjugateConfig cfg;
  cfg.n_slices = 9;
  for (auto _ : state) benchmark::DoNotOptimize(distributional_adjugate(f, cfg).total);
}
BENCHMARK(BM_Adjugate)->Unit(benchmark::kMillisecond);

void BM_Inversion(benchmark::State& state) {
  const std::vector<std::size_t> shape{33, 33, 33};
  const auto f = sample_gallery(named("cantor_shear3d"), shape);
  const std::size_t image[3] = {65, 33, 33};
  for (auto _ : state) benchmark::DoNotOptimize(invert_homeomorphism(f, image).defined_fraction);
}
BENCHMARK(BM_Inversion)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
