// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/error.hpp"
#include "voxalign/synth.hpp"

namespace voxalign {
namespace {

using oracle::Rng;

const ClassTable& sk() {
  static const ClassTable t = ClassTable::semantic_kitti();
  return t;
}

Label id(const char* name) { return *sk().find(name); }

TEST(Groups, RefinedGroupsJoinHumans) {
  const SemanticGroups g = SemanticGroups::preset(GroupPreset::C2, sk());
  EXPECT_EQ(g.mapping[id("bicyclist")], g.mapping[id("motorcyclist")]);
  EXPECT_EQ(g.mapping[id("person")], g.mapping[id("motorcyclist")]);
  EXPECT_EQ(g.mapping[id("car")], g.mapping[id("motorcycle")]);
  EXPECT_NE(g.mapping[id("car")], g.mapping[id("person")]);
  EXPECT_EQ(g.mapping[0], 0);
  EXPECT_EQ(g.group_count(), 7u);
}

TEST(Groups, CoarsePresets) {
  const SemanticGroups c0 = SemanticGroups::preset("C0", sk());
  for (std::size_t c = 1; c < sk().count(); ++c) EXPECT_EQ(c0.mapping[c], 1);
  const SemanticGroups c1 = SemanticGroups::preset("C1", sk());
  EXPECT_EQ(c1.mapping[id("car")], c1.mapping[id("bicyclist")]);
  EXPECT_EQ(c1.mapping[id("pole")], c1.mapping[id("road")]);
  EXPECT_NE(c1.mapping[id("car")], c1.mapping[id("road")]);
  EXPECT_THROW(SemanticGroups::preset("C7", sk()), ConfigError);
}

TEST(Groups, Kitti360CatchAllsAreCovered) {
  const ClassTable k3 = ClassTable::kitti360();
  const SemanticGroups g = SemanticGroups::preset(GroupPreset::C2, k3);
  EXPECT_EQ(g.mapping[*k3.find("other-structure")], g.mapping[*k3.find("building")]);
  EXPECT_EQ(g.mapping[*k3.find("other-object")], g.mapping[*k3.find("pole")]);
}

TEST(Groups, FromJson) {
  const ClassTable t{{"empty", "a", "b", "c"}};
  const SemanticGroups byname = SemanticGroups::from_json(
      R"({"name": "mine", "groups": [{"name": "ab", "classes": ["a", "b"]}, {"name": "c", "classes": ["c"]}]})", t);
  EXPECT_EQ(byname.mapping, (std::vector<Label>{0, 1, 1, 2}));
  const SemanticGroups direct = SemanticGroups::from_json(R"({"name": "m", "mapping": [0, 2, 1, 1]})", t);
  EXPECT_EQ(direct.mapping, (std::vector<Label>{0, 2, 1, 1}));
  EXPECT_THROW(SemanticGroups::from_json(R"({"name": "m", "mapping": [1, 0, 1, 1]})", t), ValidationError);
  EXPECT_THROW(SemanticGroups::from_json(R"({"name": "m", "mapping": [0, 1, 3, 1]})", t), ValidationError);
  EXPECT_THROW(SemanticGroups::from_json("{", t), ParseError);
}

TEST(Reassign, IdentityAndCollapse) {
  Rng rng(1);
  const LabelGrid g = oracle::random_labels(rng, {5, 5, 5}, 20, 0.4);
  EXPECT_EQ(reassign(g, SemanticGroups::preset(GroupPreset::C3, sk())).labels, g.labels);
  const LabelGrid c0 = reassign(g, SemanticGroups::preset(GroupPreset::C0, sk()));
  for (std::size_t i = 0; i < g.labels.size(); ++i) EXPECT_EQ(c0.labels[i], g.labels[i] == 0 ? 0 : 1);
  LabelGrid bad = g;
  bad.labels[0] = 40;
  EXPECT_THROW(reassign(bad, SemanticGroups::preset(GroupPreset::C2, sk())), MappingError);
}

LabelGrid empty_grid(GridDims d) { return LabelGrid::filled(oracle::unit_geometry(d), 0); }

TEST(Anisotropy, ClosedFormValues) {
  const CsaParams params;
  const AnisotropyMap uniform = cubic_anisotropy(empty_grid({5, 5, 5}), params);
  EXPECT_EQ(uniform.s_csa[linear_index({2, 2, 2}, {5, 5, 5})], 0.5);

  LabelGrid isolated = empty_grid({5, 5, 5});
  isolated.at({2, 2, 2}) = 1;
  const AnisotropyMap iso = cubic_anisotropy(isolated, params);
  const std::size_t c = linear_index({2, 2, 2}, {5, 5, 5});
  EXPECT_EQ(iso.s_surface[c], 6);
  EXPECT_EQ(iso.s_edge[c], 12);
  EXPECT_EQ(iso.s_vertex[c], 8);
  EXPECT_NEAR(iso.s_csa[c], 10.1, 1e-12);

  LabelGrid block = empty_grid({8, 8, 8});
  for (int x = 2; x < 6; ++x)
    for (int y = 2; y < 6; ++y)
      for (int z = 2; z < 6; ++z) block.at({x, y, z}) = 1;
  const AnisotropyMap b = cubic_anisotropy(block, params);
  const std::size_t corner = linear_index({2, 2, 2}, {8, 8, 8});
  EXPECT_EQ(b.s_surface[corner], 3);
  EXPECT_EQ(b.s_edge[corner], 9);
  EXPECT_EQ(b.s_vertex[corner], 7);
  EXPECT_NEAR(b.s_csa[corner], 6.5, 1e-12);
}

TEST(Anisotropy, BorderPolicies) {
  LabelGrid g = LabelGrid::filled(oracle::unit_geometry({3, 3, 3}), 4);
  CsaParams skip;
  CsaParams pad;
  pad.border = BorderPolicy::PadEmpty;
  const std::size_t corner = 0;
  const AnisotropyMap a = cubic_anisotropy(g, skip);
  EXPECT_EQ(a.s_surface[corner] + a.s_edge[corner] + a.s_vertex[corner], 0);
  const AnisotropyMap b = cubic_anisotropy(g, pad);
  // A corner voxel has 7 in-grid neighbors, so 19 padded ones.
  EXPECT_EQ(b.s_surface[corner] + b.s_edge[corner] + b.s_vertex[corner], 19);
  const AnisotropyMap e = cubic_anisotropy(empty_grid({3, 3, 3}), pad);
  for (double s : e.s_csa) EXPECT_EQ(s, 0.5);
}

TEST(Anisotropy, MatchesEnumerationOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const GridDims d{oracle::uniform_int(rng, 1, 7), oracle::uniform_int(rng, 1, 7), oracle::uniform_int(rng, 1, 7)};
    const LabelGrid g = oracle::random_labels(rng, d, 20, oracle::uniform(rng, 0.0, 1.0));
    for (BorderPolicy border : {BorderPolicy::Skip, BorderPolicy::PadEmpty}) {
      CsaParams p;
      p.border = border;
      p.w_e = oracle::uniform(rng, 0, 1);
      p.w_v = oracle::uniform(rng, 0, 1);
      const LabelGrid v = reassign(g, SemanticGroups::preset(GroupPreset::C2, sk()));
      const AnisotropyMap a = cubic_anisotropy(v, p);
      const AnisotropyMap o = oracle_csa(v, p);
      ASSERT_EQ(a.s_surface, o.s_surface);
      ASSERT_EQ(a.s_edge, o.s_edge);
      ASSERT_EQ(a.s_vertex, o.s_vertex);
      ASSERT_EQ(a.s_csa, o.s_csa);
    }
  }
}

TEST(Anisotropy, PermutationInvarianceAndMonotonicity) {
  Rng rng(3);
  const SemanticGroups c2 = SemanticGroups::preset(GroupPreset::C2, sk());
  const SemanticGroups c3 = SemanticGroups::preset(GroupPreset::C3, sk());
  const SemanticGroups c1 = SemanticGroups::preset(GroupPreset::C1, sk());
  const SemanticGroups c0 = SemanticGroups::preset(GroupPreset::C0, sk());
  for (int trial = 0; trial < 20; ++trial) {
    const LabelGrid g = oracle::random_labels(rng, {6, 6, 6}, 20, 0.5);
    const LabelGrid v = reassign(g, c2);
    // Bijection on group ids, empty included.
    std::vector<Label> perm(c2.group_count());
    std::iota(perm.begin(), perm.end(), Label{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    LabelGrid permuted = v;
    for (auto& l : permuted.labels) l = perm[l];
    const CsaParams p;
    EXPECT_EQ(cubic_anisotropy(v, p).s_csa, cubic_anisotropy(permuted, p).s_csa);

    const AnisotropyMap fine = cubic_anisotropy(reassign(g, c3), p);
    const AnisotropyMap mid = cubic_anisotropy(v, p);
    const AnisotropyMap coarse = cubic_anisotropy(reassign(g, c1), p);
    const AnisotropyMap coarsest = cubic_anisotropy(reassign(g, c0), p);
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
      EXPECT_LE(mid.s_surface[i], fine.s_surface[i]);
      EXPECT_LE(mid.s_edge[i], fine.s_edge[i]);
      EXPECT_LE(coarse.s_vertex[i], mid.s_vertex[i]);
      EXPECT_LE(coarsest.s_csa[i], coarse.s_csa[i]);
      EXPECT_GE(fine.s_csa[i], p.beta);
      EXPECT_LE(fine.s_csa[i], p.alpha * (6 + 12 * p.w_e + 8 * p.w_v) + p.beta);
    }
  }
}

TEST(Params, Validation) {
  CsaParams p;
  p.w_e = -0.1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = CsaParams{};
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  EXPECT_DOUBLE_EQ(CsaParams{}.weight(6, 12, 8), 10.1);
}

struct LossCase {
  FeatureGrid scores;
  LabelGrid labels;
  AnisotropyMap csa;
};

LossCase random_case(Rng& rng, GridDims d, int classes) {
  LossCase c{oracle::random_scores(rng, oracle::unit_geometry(d), classes, 2.0),
             oracle::random_labels(rng, d, classes, 0.3), {}};
  c.csa = cubic_anisotropy(c.labels, CsaParams{});
  return c;
}

TEST(CsaCrossEntropy, UnitWeightsEqualPlainCrossEntropy) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    LossCase c = random_case(rng, {3, 4, 2}, 5);
    std::fill(c.csa.s_csa.begin(), c.csa.s_csa.end(), 1.0);
    const double plain = oracle::weighted_cross_entropy(c.scores, c.labels, c.csa.s_csa);
    EXPECT_NEAR(csa_cross_entropy(c.scores, c.labels, c.csa).value, plain, 1e-13);
  }
}

TEST(CsaCrossEntropy, WeightedValueMatchesReference) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const LossCase c = random_case(rng, {4, 3, 3}, 4);
    EXPECT_NEAR(csa_cross_entropy(c.scores, c.labels, c.csa).value,
                oracle::weighted_cross_entropy(c.scores, c.labels, c.csa.s_csa), 1e-12);
  }
}

TEST(CsaCrossEntropy, UniformScoresGiveLogN) {
  const GridGeometry g = oracle::unit_geometry({3, 3, 3});
  const FeatureGrid s = FeatureGrid::zeros(g, 6);
  const LabelGrid l = LabelGrid::filled(g, 2);
  AnisotropyMap ones = cubic_anisotropy(l, CsaParams{});
  std::fill(ones.s_csa.begin(), ones.s_csa.end(), 1.0);
  EXPECT_NEAR(csa_cross_entropy(s, l, ones).value, std::log(6.0), 1e-15);
}

TEST(CsaCrossEntropy, PeakedScoresApproachZero) {
  const GridGeometry g = oracle::unit_geometry({2, 2, 2});
  FeatureGrid s = FeatureGrid::zeros(g, 3);
  LabelGrid l = LabelGrid::filled(g, 1);
  for (std::size_t v = 0; v < 8; ++v) s.row(v)[1] = 60.0;
  EXPECT_LT(csa_cross_entropy(s, l, cubic_anisotropy(l, CsaParams{})).value, 1e-24);
}

TEST(CsaCrossEntropy, GradientMatchesFiniteDifferences) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const LossCase c = random_case(rng, {3, 3, 3}, 4);
    const LossReport r = csa_cross_entropy(c.scores, c.labels, c.csa);
    const auto fd = oracle_grad(
        [&](std::span<const double> x) {
          FeatureGrid s = c.scores;
          s.values.assign(x.begin(), x.end());
          return csa_cross_entropy(s, c.labels, c.csa).value;
        },
        c.scores.values, 1e-5);
    EXPECT_LT(oracle::relative_error(r.gradient, fd), 1e-6);
    // Softmax Jacobian rows sum to zero.
    for (std::size_t v = 0; v < 27; ++v) {
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += r.gradient[v * 4 + k];
      EXPECT_NEAR(sum, 0.0, 1e-15);
    }
  }
}

TEST(CsaCrossEntropy, MaskAndInvalidVoxels) {
  Rng rng(7);
  LossCase c = random_case(rng, {2, 2, 2}, 3);
  BoolGrid none = BoolGrid::filled({2, 2, 2}, false);
  EXPECT_THROW(csa_cross_entropy(c.scores, c.labels, c.csa, &none), DegenerateInputError);

  BoolGrid one = none;
  one.values[3] = 1;
  const LossReport r = csa_cross_entropy(c.scores, c.labels, c.csa, &one);
  for (std::size_t i = 0; i < r.gradient.size(); ++i) {
    if (i / 3 != 3) EXPECT_EQ(r.gradient[i], 0.0);
  }
  c.labels.invalid_mask = std::vector<std::uint8_t>(8, 0);
  (*c.labels.invalid_mask)[3] = 1;
  EXPECT_THROW(csa_cross_entropy(c.scores, c.labels, c.csa, &one), DegenerateInputError);

  LabelGrid wide = c.labels;
  wide.labels[0] = 3;
  EXPECT_THROW(csa_cross_entropy(c.scores, wide, c.csa), MappingError);
}

}  // namespace
}  // namespace voxalign
