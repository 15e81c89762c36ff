// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "voxalign/camera.hpp"
#include "voxalign/error.hpp"

namespace voxalign {
namespace {

CameraRig identity_rig(double f, double cx, double cy, ImageSize size = {640, 480}) {
  return CameraRig::from_intrinsics(f, f, cx, cy, Mat3::Identity(), Vec3::Zero(), size);
}

TEST(ProjectPoint, IdentityPose) {
  const Projection p = project_point({1, 2, 4}, identity_rig(2.0, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(p.u, 0.5);
  EXPECT_DOUBLE_EQ(p.v, 1.0);
  EXPECT_DOUBLE_EQ(p.depth, 4.0);
}

TEST(ProjectPoint, OpticalAxisHitsPrincipalPoint) {
  const Projection p = project_point({0, 0, 1}, identity_rig(700.0, 610.0, 185.0));
  EXPECT_DOUBLE_EQ(p.u, 610.0);
  EXPECT_DOUBLE_EQ(p.v, 185.0);
  EXPECT_DOUBLE_EQ(p.depth, 1.0);
}

TEST(ProjectPoint, CameraPlaneThrows) {
  EXPECT_THROW(project_point({1, 1, 0}, identity_rig(1.0, 0.0, 0.0)), DomainError);
}

TEST(ProjectPoint, NegativeDepthIsReported) {
  EXPECT_LT(project_point({1, 1, -3}, identity_rig(1.0, 0.0, 0.0)).depth, 0.0);
}

TEST(CameraRig, RejectsBadIntrinsicsAndRotations) {
  Mat3 K = Mat3::Identity();
  K(1, 0) = 0.5;
  EXPECT_THROW(CameraRig::make(K, Mat3::Identity(), Vec3::Zero(), {10, 10}), ValidationError);
  EXPECT_THROW(CameraRig::from_intrinsics(-1, 1, 0, 0, Mat3::Identity(), Vec3::Zero(), {10, 10}),
               ValidationError);
  Mat3 reflect = Mat3::Identity();
  reflect(0, 0) = -1.0;
  EXPECT_THROW(CameraRig::from_intrinsics(1, 1, 0, 0, reflect, Vec3::Zero(), {10, 10}),
               ValidationError);
  Mat3 skewed = Mat3::Identity();
  skewed(0, 1) = 1e-6;
  EXPECT_THROW(CameraRig::from_intrinsics(1, 1, 0, 0, skewed, Vec3::Zero(), {10, 10}),
               ValidationError);
  EXPECT_THROW(identity_rig(1.0, 0.0, 0.0, {0, 10}), ValidationError);
}

TEST(InFov, HalfOpenBounds) {
  const CameraRig rig = identity_rig(1.0, 0.0, 0.0, {10, 8});
  EXPECT_FALSE(in_fov(-1, 5, 2, rig));
  EXPECT_FALSE(in_fov(5, 5, -2, rig));
  EXPECT_FALSE(in_fov(10.0, 5, 2, rig));
  // Center of the last pixel column is inside.
  EXPECT_TRUE(in_fov(10 - 1 + 0.5, 5, 2, rig));
  EXPECT_TRUE(in_fov(0.0, 0.0, 2, rig));
  EXPECT_FALSE(in_fov(0.0, 8.0, 2, rig));
}

TEST(FovMask, CameraLookingAwayIsEmpty) {
  const GridGeometry g{{8, 8, 8}, Vec3::Zero(), 1.0};
  const CameraRig rig = CameraRig::look_at(50, 50, 32, 32, {64, 64}, {-5, 4, 4}, {-10, 4, 4});
  EXPECT_EQ(fov_mask(g, rig).count_true(), 0u);
}

TEST(FovMask, WideFrustumCoversGrid) {
  const GridGeometry g{{8, 8, 8}, Vec3::Zero(), 1.0};
  const CameraRig rig = CameraRig::look_at(10, 10, 500, 500, {1000, 1000}, {-20, 4, 4}, {4, 4, 4});
  EXPECT_EQ(fov_mask(g, rig).count_true(), 512u);
}

TEST(FovMask, MatchesBruteForceProjection) {
  const GridGeometry g{{8, 8, 8}, Vec3(-4, -4, -4), 1.0};
  const CameraRig centered = CameraRig::from_intrinsics(3, 3, 4, 4, Mat3::Identity(), Vec3::Zero(),
                                                        {8, 8});
  EXPECT_EQ(fov_mask(g, centered).values, oracle::fov_by_projection(g, centered));

  oracle::Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const CameraRig rig = oracle::random_rig(rng);
    const GridGeometry rg{{8, 8, 8}, Vec3(oracle::uniform(rng, -10, 10), oracle::uniform(rng, -10, 10),
                                        oracle::uniform(rng, -10, 10)),
                          oracle::uniform(rng, 0.2, 3.0)};
    ASSERT_EQ(fov_mask(rg, rig).values, oracle::fov_by_projection(rg, rig));
  }
}

TEST(FovMask, MonotoneInImageSize) {
  const GridGeometry g{{10, 10, 4}, Vec3(0, -5, -2), 1.0};
  const Mat3 R = forward_x_rotation();
  const BoolGrid small = fov_mask(g, CameraRig::from_intrinsics(20, 20, 20, 10, R, Vec3::Zero(), {40, 20}));
  const BoolGrid large = fov_mask(g, CameraRig::from_intrinsics(20, 20, 20, 10, R, Vec3::Zero(), {80, 60}));
  for (std::size_t i = 0; i < small.values.size(); ++i) {
    if (small.values[i]) EXPECT_TRUE(large.values[i]) << i;
  }
  EXPECT_GT(large.count_true(), small.count_true());
}

TEST(Backproject, InvertsProjectionExamples) {
  const CameraRig rig = identity_rig(2.0, 0.0, 0.0);
  const Vec3 p = backproject_pixel(0.5, 1.0, 4.0, rig);
  EXPECT_NEAR((p - Vec3(1, 2, 4)).norm(), 0.0, 1e-15);
  const Vec3 axis = backproject_pixel(610, 185, 7.5, identity_rig(700, 610, 185));
  EXPECT_NEAR((axis - Vec3(0, 0, 7.5)).norm(), 0.0, 1e-12);
  EXPECT_THROW(backproject_pixel(1, 1, 0.0, rig), DomainError);
  EXPECT_THROW(backproject_pixel(1, 1, -2.0, rig), DomainError);
}

TEST(Backproject, RandomRoundTrip) {
  oracle::Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CameraRig rig = oracle::random_rig(rng);
    const double u = oracle::uniform(rng, 0, rig.image_size().width);
    const double v = oracle::uniform(rng, 0, rig.image_size().height);
    const double d = oracle::uniform(rng, 0.5, 80.0);
    const Projection pr = project_point(backproject_pixel(u, v, d, rig), rig);
    worst = std::max({worst, std::abs(pr.u - u) / std::max(1.0, std::abs(u)),
                      std::abs(pr.v - v) / std::max(1.0, std::abs(v)), std::abs(pr.depth - d) / d});
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Projection, RigidInvariance) {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const CameraRig rig = oracle::random_rig(rng);
    const Vec3 p(oracle::uniform(rng, -30, 30), oracle::uniform(rng, -30, 30), oracle::uniform(rng, -30, 30));
    if (std::abs((rig.R() * p + rig.t()).z()) < 1e-3) continue;
    const Mat3 Q = oracle::euler(oracle::uniform(rng, -3, 3), oracle::uniform(rng, -1.5, 1.5),
                                 oracle::uniform(rng, -3, 3));
    const Vec3 s(oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5), oracle::uniform(rng, -5, 5));
    // Move the point by (Q, s) and fold the inverse motion into the rig.
    const Vec3 moved = Q * p + s;
    const Mat3 R2 = rig.R() * Q.transpose();
    const Vec3 t2 = rig.t() - R2 * s;
    const CameraRig rig2 = CameraRig::make(rig.K(), R2, t2, rig.image_size(), 1e-9);
    const Projection a = project_point(p, rig);
    const Projection b = project_point(moved, rig2);
    const double scale = std::max({1.0, std::abs(a.u), std::abs(a.v)});
    EXPECT_NEAR(a.u, b.u, 1e-9 * scale * 100);
    EXPECT_NEAR(a.v, b.v, 1e-9 * scale * 100);
    EXPECT_NEAR(a.depth, b.depth, 1e-9 * std::max(1.0, std::abs(a.depth)));
  }
}

TEST(BackprojectDepthmap, InvalidPixelsSkippedInRowMajorOrder) {
  DepthMap dm = DepthMap::filled(3, 2, 0.0);
  EXPECT_TRUE(backproject_depthmap(dm, identity_rig(1, 0, 0)).empty());
  dm.at(2, 0) = 2.0;
  dm.at(0, 1) = 3.0;
  const auto cloud = backproject_depthmap(dm, identity_rig(1, 0, 0));
  ASSERT_EQ(cloud.size(), 2u);
  EXPECT_NEAR(cloud[0].x(), 5.0, 1e-12);  // (2 + 0.5) * 2
  EXPECT_NEAR(cloud[1].y(), 4.5, 1e-12);  // (1 + 0.5) * 3
}

TEST(BackprojectDepthmap, ConstantPlane) {
  const DepthMap dm = DepthMap::filled(16, 12, 3.25);
  for (const Vec3& p : backproject_depthmap(dm, identity_rig(10, 8, 6))) {
    EXPECT_NEAR(p.z(), 3.25, 1e-12);
  }
}

TEST(ForwardX, MapsGridFrameToCameraFrame) {
  const Mat3 R = forward_x_rotation();
  EXPECT_NEAR((R * Vec3::UnitX() - Vec3::UnitZ()).norm(), 0.0, 0.0);
  EXPECT_NEAR((R * Vec3::UnitY() + Vec3::UnitX()).norm(), 0.0, 0.0);
  EXPECT_NEAR((R * Vec3::UnitZ() + Vec3::UnitY()).norm(), 0.0, 0.0);
  EXPECT_DOUBLE_EQ(R.determinant(), 1.0);
}

}  // namespace
}  // namespace voxalign
