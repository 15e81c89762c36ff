// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "voxalign/camera.hpp"
#include "voxalign/cda.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/kittio.hpp"
#include "voxalign/lift.hpp"

namespace voxalign {
namespace {

LabelGrid random_labels(GridDims dims, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cls(1, 19);
  LabelGrid g = LabelGrid::filled(GridGeometry::kitti_volume(dims), 0);
  for (auto& l : g.labels) l = u(rng) < 0.9 ? 0 : static_cast<Label>(cls(rng));
  return g;
}

FeatureGrid random_scores(GridDims dims, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 2.0);
  FeatureGrid f = FeatureGrid::zeros(GridGeometry::kitti_volume(dims), channels);
  for (double& v : f.values) v = n(rng);
  return f;
}

void BM_CubicAnisotropy(benchmark::State& state) {
  const auto side = static_cast<std::int32_t>(state.range(0));
  const LabelGrid g = random_labels({side, side, side / 8}, 1);
  const LabelGrid v = reassign(g, SemanticGroups::preset(GroupPreset::C2, ClassTable::semantic_kitti()));
  for (auto _ : state) benchmark::DoNotOptimize(cubic_anisotropy(v, CsaParams{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.labels.size()));
}
BENCHMARK(BM_CubicAnisotropy)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CsaCrossEntropy(benchmark::State& state) {
  const GridDims d{64, 64, 8};
  const LabelGrid g = random_labels(d, 2);
  const FeatureGrid s = random_scores(d, 20, 3);
  const AnisotropyMap csa = cubic_anisotropy(g, CsaParams{});
  for (auto _ : state) benchmark::DoNotOptimize(csa_cross_entropy(s, g, csa));
}
BENCHMARK(BM_CsaCrossEntropy)->Unit(benchmark::kMillisecond);

void BM_SelectCritical(benchmark::State& state) {
  const GridDims d{128, 128, 16};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  ScoreGrid conf{GridGeometry::kitti_volume(d), std::vector<double>(d.count())};
  RealGrid csa{d, std::vector<double>(d.count())};
  for (double& v : conf.scores) v = u(rng);
  for (double& v : csa.values) v = 0.5 + 10 * u(rng);
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(select_critical(conf, csa, k));
}
BENCHMARK(BM_SelectCritical)->Arg(2048)->Arg(4096)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_CriticalAlignment(benchmark::State& state) {
  const ResolutionPair pair = ResolutionPair::make({128, 128, 16}, {64, 64, 8});
  const FeatureGrid high = random_scores(pair.high, 20, 5);
  const FeatureGrid low = random_scores(pair.low, 20, 6);
  std::vector<std::size_t> idx(4096);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, pair.high.count() - 1);
  for (auto& i : idx) i = pick(rng);
  const std::vector<std::size_t> low_idx = pair_across_resolutions(idx, pair);
  for (auto _ : state) benchmark::DoNotOptimize(critical_alignment(high, low, idx, low_idx));
}
BENCHMARK(BM_CriticalAlignment)->Unit(benchmark::kMillisecond);

void BM_FovMask(benchmark::State& state) {
  const GridGeometry geom = GridGeometry::semantic_kitti();
  const CameraRig rig = CameraRig::from_intrinsics(707, 707, 604, 180, forward_x_rotation(),
                                                   Vec3::Zero(), kKittiImageSize);
  for (auto _ : state) benchmark::DoNotOptimize(fov_mask(geom, rig));
}
BENCHMARK(BM_FovMask)->Unit(benchmark::kMillisecond);

void BM_ContainerRoundTrip(benchmark::State& state) {
  const FeatureGrid f = random_scores({64, 64, 8}, 20, 8);
  for (auto _ : state) {
    const Bytes b = write_container(to_container(f));
    benchmark::DoNotOptimize(read_container(b));
  }
}
BENCHMARK(BM_ContainerRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace voxalign

BENCHMARK_MAIN();
