// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "oracles.hpp"
#include "voxalign/error.hpp"
#include "voxalign/kittio.hpp"

namespace voxalign {
namespace {

using oracle::Rng;

TEST(OccupancyBin, GoldenBitOrder) {
  const GridGeometry sk = GridGeometry::semantic_kitti();
  Bytes bytes(sk.dims.count() / 8, 0);
  const LabelGrid zero = read_occupancy_bin(bytes, sk);
  EXPECT_TRUE(std::all_of(zero.labels.begin(), zero.labels.end(), [](Label l) { return l == 0; }));
  bytes[0] = 0x80;
  bytes[1] = 0x01;
  const LabelGrid g = read_occupancy_bin(bytes, sk);
  std::vector<std::size_t> occupied;
  for (std::size_t i = 0; i < g.labels.size(); ++i)
    if (g.labels[i]) occupied.push_back(i);
  EXPECT_EQ(occupied, (std::vector<std::size_t>{0, 15}));
  bytes.pop_back();
  EXPECT_THROW(read_occupancy_bin(bytes, sk), FormatError);
}

TEST(OccupancyBin, RoundTrip) {
  Rng rng(30);
  for (int trial = 0; trial < 20; ++trial) {
    const LabelGrid g = oracle::random_labels(rng, {8, 4, 2 * oracle::uniform_int(rng, 1, 4)}, 2, 0.5);
    const LabelGrid back = read_occupancy_bin(write_occupancy_bin(g), g.geometry);
    EXPECT_EQ(back.labels, g.labels);
  }
}

TEST(Labels, RoundTripAndMapping) {
  Rng rng(31);
  const LabelMapping id = LabelMapping::identity(ClassTable::semantic_kitti());
  const LabelGrid g = oracle::random_labels(rng, {6, 5, 4}, 20, 0.5);
  EXPECT_EQ(read_labels(write_labels(g), id, g.geometry).labels, g.labels);

  const LabelMapping sk = LabelMapping::semantic_kitti();
  Bytes raw(2 * g.labels.size(), 0);
  EXPECT_EQ(read_labels(raw, sk, g.geometry).labels, std::vector<Label>(g.labels.size(), 0));
  raw[2] = 252;  // moving car folds into car
  EXPECT_EQ(read_labels(raw, sk, g.geometry).labels[1], *sk.table.find("car"));
  raw[4] = 77;
  try {
    read_labels(raw, sk, g.geometry);
    FAIL() << "unmapped id accepted";
  } catch (const MappingError& e) {
    EXPECT_NE(std::string(e.what()).find("77"), std::string::npos);
  }
}

TEST(Labels, MappingFiles) {
  const auto root = std::filesystem::path(VOXALIGN_SOURCE_DIR) / "core" / "data";
  const LabelMapping sk = LabelMapping::from_json(read_text_file(root / "semantickitti_mapping.json"));
  const LabelMapping builtin = LabelMapping::semantic_kitti();
  EXPECT_EQ(sk.table.names, builtin.table.names);
  EXPECT_EQ(sk.raw_to_train, builtin.raw_to_train);
  const LabelMapping k3 = LabelMapping::from_json(read_text_file(root / "kitti360_mapping.json"));
  EXPECT_EQ(k3.table.names, ClassTable::kitti360().names);
  EXPECT_EQ(k3.map(18), 18);

  EXPECT_THROW(LabelMapping::from_json(R"({"names": ["empty", "a"], "map": {"3": 2}})"), MappingError);
  EXPECT_THROW(LabelMapping::from_json(R"({"names": ["empty", "a"], "map": {"x": 1}})"), ParseError);
  EXPECT_THROW(LabelMapping::from_json("[1,"), ParseError);
}

TEST(Bundle, DiscoverAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "voxalign_bundle_test";
  std::filesystem::create_directories(dir);
  const GridGeometry geom = oracle::unit_geometry({8, 2, 2});
  LabelGrid g = LabelGrid::filled(geom, 0);
  g.labels[3] = 9;
  g.labels[20] = 1;
  write_file(dir / "000000.label", write_labels(g));
  BoolGrid inv = BoolGrid::filled(geom.dims, false);
  inv.values[31] = 1;
  write_file(dir / "000000.invalid", pack_bits(inv));
  const VoxelFileBundle b = VoxelFileBundle::discover(dir, "000000");
  EXPECT_FALSE(b.occupancy);
  const LabelGrid back = load_voxel_bundle(b, LabelMapping::identity(ClassTable::semantic_kitti()), geom);
  EXPECT_EQ(back.labels, g.labels);
  EXPECT_TRUE(back.is_invalid(31));
  EXPECT_FALSE(back.is_invalid(30));
  EXPECT_THROW(load_voxel_bundle(VoxelFileBundle{}, LabelMapping::semantic_kitti(), geom), IoError);
  EXPECT_THROW(read_file(dir / "missing.bin"), IoError);
  std::filesystem::remove_all(dir);
}

TEST(Calibration, IdentityAndRoundTrip) {
  const std::string ident =
      "P0: 1 0 0 0 0 1 0 0 0 0 1 0\n"
      "P2: 1 0 0 0 0 1 0 0 0 0 1 0\n"
      "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n";
  const CameraRig r = read_calibration(ident, {10, 10});
  EXPECT_EQ(r.K(), Mat3::Identity());
  EXPECT_EQ(r.R(), Mat3::Identity());
  EXPECT_EQ(r.t(), Vec3::Zero());

  Rng rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const CameraRig rig = oracle::random_rig(rng);
    const CameraRig back = read_calibration(write_calibration(rig), rig.image_size());
    EXPECT_LT((back.K() - rig.K()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.R() - rig.R()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.t() - rig.t()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Calibration, ProjectionOffsetFoldsIntoTranslation) {
  // P2 = K [I | b] moves the camera center; points project identically either way.
  const std::string text =
      "P2: 700 0 600 1400 0 700 180 0 0 0 1 0\n"
      "Tr: 1 0 0 0.5 0 1 0 0 0 0 1 0\n";
  const CameraRig r = read_calibration(text);
  EXPECT_NEAR(r.t().x(), 2.5, 1e-12);
  EXPECT_NEAR(r.t().y(), 0.0, 1e-12);
}

TEST(Calibration, Errors) {
  EXPECT_THROW(read_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\nTr: 1 0 0 0 0 1 0 0 0 0 1\n"), ParseError);
  EXPECT_THROW(read_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\n"), ParseError);
  EXPECT_THROW(read_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\nTr: 1 0 0 0 0 1 0 0 0 0 x 0\n"), ParseError);
  EXPECT_THROW(read_calibration("P2: 1 0 0 0 0 1 0 0 0 0 1 0\nTr: 2 0 0 0 0 1 0 0 0 0 1 0\n"), ValidationError);
}

TEST(Container, RoundTripsAreLossless) {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const GridGeometry geom = oracle::unit_geometry(
        {oracle::uniform_int(rng, 1, 6), oracle::uniform_int(rng, 1, 6), oracle::uniform_int(rng, 1, 6)});
    const FeatureGrid f = oracle::random_scores(rng, geom, oracle::uniform_int(rng, 1, 5), 10.0);
    const Bytes bytes = write_container(to_container(f));
    const GridContainer c = read_container(bytes);
    EXPECT_EQ(features_from_container(c, geom).values, f.values);
    EXPECT_EQ(write_container(c), bytes);

    const LabelGrid l = oracle::random_labels(rng, geom.dims, 20, 0.5, 0.3);
    const LabelGrid lb = labels_from_container(read_container(write_container(to_container(l))), geom);
    EXPECT_EQ(lb.labels, l.labels);
    EXPECT_EQ(lb.invalid_mask, l.invalid_mask);

    ScoreGrid s{geom, std::vector<double>(geom.dims.count())};
    for (double& v : s.scores) v = oracle::uniform(rng, 0, 1);
    EXPECT_EQ(scores_from_container(read_container(write_container(to_container(s))), geom).scores, s.scores);

    AnisotropyMap a{geom, {}, {}, {}, {}};
    for (std::size_t i = 0; i < geom.dims.count(); ++i) {
      a.s_surface.push_back(oracle::uniform_int(rng, 0, 6));
      a.s_edge.push_back(oracle::uniform_int(rng, 0, 12));
      a.s_vertex.push_back(oracle::uniform_int(rng, 0, 8));
      a.s_csa.push_back(oracle::uniform(rng, 0.5, 10.1));
    }
    const AnisotropyMap ab = anisotropy_from_container(read_container(write_container(to_container(a))), geom);
    EXPECT_EQ(ab.s_surface, a.s_surface);
    EXPECT_EQ(ab.s_vertex, a.s_vertex);
    EXPECT_EQ(ab.s_csa, a.s_csa);

    Matrix m = Matrix::zeros(static_cast<std::size_t>(oracle::uniform_int(rng, 1, 9)), 3);
    for (double& v : m.values) v = oracle::uniform(rng, -1, 1);
    EXPECT_EQ(matrix_from_container(read_container(write_container(to_container(m)))).values, m.values);

    DepthMap d = DepthMap::filled(oracle::uniform_int(rng, 1, 9), oracle::uniform_int(rng, 1, 9), 0.0);
    for (double& v : d.depth) v = oracle::uniform(rng, 0, 50);
    const DepthMap db = depth_map_from_container(read_container(write_container(to_container(d))));
    EXPECT_EQ(db.width, d.width);
    EXPECT_EQ(db.depth, d.depth);

    BoolGrid mask = BoolGrid::filled(geom.dims, false);
    for (auto& v : mask.values) v = oracle::uniform_int(rng, 0, 1);
    EXPECT_EQ(mask_from_container(read_container(write_container(to_container(mask)))).values, mask.values);
  }
}

TEST(Container, CorruptionIsDetected) {
  Rng rng(34);
  const FeatureGrid f = oracle::random_scores(rng, oracle::unit_geometry({3, 3, 3}), 2, 1.0);
  const Bytes good = write_container(to_container(f));
  for (std::size_t pos : {std::size_t{30}, good.size() - 1}) {
    Bytes bad = good;
    bad[pos] ^= 0x10;
    EXPECT_THROW(read_container(bad), FormatError);
  }
  EXPECT_THROW(read_container(Bytes(good.begin(), good.end() - 5)), FormatError);
  EXPECT_THROW(read_container(Bytes(good.begin(), good.begin() + 10)), FormatError);
  Bytes magic = good;
  magic[0] = 'X';
  EXPECT_THROW(read_container(magic), FormatError);
  // Huge declared dims must be rejected before any allocation.
  Bytes huge = good;
  for (std::size_t i = 8; i < 20; ++i) huge[i] = 0xff;
  EXPECT_THROW(read_container(huge), FormatError);

  GridContainer empty = to_container(f);
  empty.channels = 0;
  empty.payload.clear();
  EXPECT_THROW(write_container(empty), ValidationError);
  EXPECT_THROW(features_from_container(read_container(good), oracle::unit_geometry({3, 3, 4})), FormatError);
  EXPECT_THROW(labels_from_container(read_container(good), oracle::unit_geometry({3, 3, 3})), FormatError);
}

TEST(Container, KnownChecksum) {
  const std::string s = "123456789";
  EXPECT_EQ(crc32_ieee({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}), 0xCBF43926u);
}

TEST(CriticalSetJson, RoundTrip) {
  CriticalSetFile f{{4, 4, 4}, {2, 2, 2}, 2, {5, 1}, {1, 0}, {0.75, 0.5}};
  const CriticalSetFile back = parse_critical_set_json(critical_set_json(f));
  EXPECT_EQ(back.high_resolution, f.high_resolution);
  EXPECT_EQ(back.lambda, 2);
  EXPECT_EQ(back.high_indices, f.high_indices);
  EXPECT_EQ(back.low_indices, f.low_indices);
  EXPECT_EQ(back.ranking_score, f.ranking_score);
  EXPECT_THROW(parse_critical_set_json("{}"), ParseError);
}

}  // namespace
}  // namespace voxalign
