// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "voxalign/error.hpp"
#include "voxalign/kittio.hpp"
#include "voxalign/synth.hpp"

namespace voxalign {
namespace {

using oracle::Rng;

std::filesystem::path scene_path(const char* name) {
  return std::filesystem::path(VOXALIGN_SOURCE_DIR) / "data" / "scenes" / name;
}

TEST(SplitMix, ReferenceSequence) {
  SplitMix64 r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ULL);
  SplitMix64 u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    EXPECT_LT(u.below(5), 5u);
  }
}

TEST(Generate, EmptyAndGround) {
  SceneSpec spec;
  spec.geometry = oracle::unit_geometry({6, 5, 4});
  spec.table = ClassTable::semantic_kitti();
  CameraPlacement cam;
  cam.fx = cam.fy = 10;
  cam.cx = 8;
  cam.cy = 6;
  cam.size = {16, 12};
  cam.eye = Vec3(-5, 2.5, 2);
  cam.target = Vec3(3, 2.5, 2);
  spec.cameras = {cam};
  const Scene empty = generate_scene(spec);
  EXPECT_TRUE(std::all_of(empty.labels.labels.begin(), empty.labels.labels.end(), [](Label l) { return l == 0; }));
  for (double z : empty.depths[0].depth) EXPECT_EQ(z, 0.0);

  Primitive ground;
  ground.kind = Primitive::Kind::Ground;
  ground.z = 0;
  ground.label = 9;
  spec.primitives = {ground};
  const Scene g = generate_scene(spec);
  EXPECT_EQ(std::count(g.labels.labels.begin(), g.labels.labels.end(), Label{9}), 6 * 5);
}

TEST(Generate, DeterministicForSeed) {
  const SceneSpec spec = SceneSpec::from_json(read_text_file(scene_path("blocks16.json")));
  const Scene a = generate_scene(spec);
  const Scene b = generate_scene(spec);
  EXPECT_EQ(a.labels.labels, b.labels.labels);
  EXPECT_EQ(a.depths[0].depth, b.depths[0].depth);
  SceneSpec other = spec;
  other.seed = 43;
  EXPECT_NE(generate_scene(other).labels.labels, a.labels.labels);
}

TEST(Generate, SparseSceneFraction) {
  const SceneSpec spec = SceneSpec::from_json(read_text_file(scene_path("sparse_7p1.json")));
  const Scene s = generate_scene(spec);
  const auto empty = std::count(s.labels.labels.begin(), s.labels.labels.end(), Label{0});
  EXPECT_EQ(empty, 92900);
}

TEST(RenderDepth, SlabSeenFromAbove) {
  const GridGeometry geom = oracle::unit_geometry({4, 4, 4});
  LabelGrid g = LabelGrid::filled(geom, 0);
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) g.at({x, y, 0}) = 9;
  const CameraRig rig = CameraRig::look_at(10, 10, 4, 4, {8, 8}, Vec3(2, 2, 10), Vec3(2, 2, 0), Vec3::UnitY());
  const DepthMap d = render_depth(g, rig);
  int hits = 0;
  for (double z : d.depth) {
    if (z == 0.0) continue;
    ++hits;
    EXPECT_NEAR(z, 9.5, 1e-9);
  }
  EXPECT_GT(hits, 0);
}

TEST(RenderDepth, BackProjectedPointsLandInOccupiedVoxels) {
  const Scene s = generate_scene(SceneSpec::from_json(read_text_file(scene_path("blocks16.json"))));
  const GridGeometry& geom = s.labels.geometry;
  const std::vector<Vec3> cloud = backproject_depthmap(s.depths[0], s.rigs[0]);
  ASSERT_GT(cloud.size(), 100u);
  for (const Vec3& p : cloud) {
    const Vec3 v = (p - geom.origin) / geom.voxel_size;
    const Coord c{static_cast<int>(std::floor(v.x())), static_cast<int>(std::floor(v.y())),
                  static_cast<int>(std::floor(v.z()))};
    ASSERT_TRUE(in_bounds(c, geom.dims));
    EXPECT_NE(s.labels.at(c), 0);
  }
}

TEST(SceneSpec, Validation) {
  EXPECT_THROW(SceneSpec::from_json(R"({"dims": [4, 4, 4], "bogus": 1})"), SpecError);
  EXPECT_THROW(SceneSpec::from_json(R"({"dims": [4, 4]})"), SpecError);
  EXPECT_THROW(SceneSpec::from_json(R"({"dims": [4, 4, 4], "primitives": [{"type": "box", "min": [0,0,0], "max": [5,1,1], "class": "car"}]})"),
               SpecError);
  EXPECT_THROW(SceneSpec::from_json(R"({"dims": [4, 4, 4], "primitives": [{"type": "box", "min": [0,0,0], "max": [1,1,1], "class": "dragon"}]})"),
               SpecError);
  EXPECT_THROW(SceneSpec::from_json("{"), ParseError);
}

TEST(Oracles, TopK) {
  EXPECT_EQ(oracle_topk(std::vector<double>{0.9, 0.1, 0.5}, 2), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(oracle_topk(std::vector<double>{1, 1, 1, 1}, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(Oracles, GradientOfQuadratic) {
  const std::vector<double> x{1.0, -2.0, 0.5};
  const auto g = oracle_grad(
      [](std::span<const double> v) {
        double s = 0;
        for (double e : v) s += 0.5 * e * e;
        return s;
      },
      x, 1e-4);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(g[i], x[i], 1e-8);
}

TEST(Oracles, CsaCountsOfSimpleGrids) {
  LabelGrid g = LabelGrid::filled(oracle::unit_geometry({3, 3, 3}), 0);
  g.at({1, 1, 1}) = 2;
  const AnisotropyMap a = oracle_csa(g, CsaParams{});
  EXPECT_EQ(a.s_surface[13], 6);
  EXPECT_EQ(a.s_edge[13], 12);
  EXPECT_EQ(a.s_vertex[13], 8);
  const AnisotropyMap same = oracle_csa(LabelGrid::filled(g.geometry, 3), CsaParams{});
  for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(same.s_surface[i] + same.s_edge[i] + same.s_vertex[i], 0);
}

}  // namespace
}  // namespace voxalign
