// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_CAMERA_HPP
#define VOXALIGN_CAMERA_HPP

#include <vector>

#include <Eigen/Core>

#include "voxalign/grid.hpp"

namespace voxalign {

using Mat3 = Eigen::Matrix3d;

struct ImageSize {
  int width = 0;
  int height = 0;
  bool operator==(const ImageSize&) const = default;
};

// Pinhole camera: camera = R * world + t, pixel = K * camera / z.
//
// Pixel (0,0) covers [0,1) x [0,1); image coordinates are continuous and
// field-of-view tests use half-open bounds.
class CameraRig {
 public:
  static constexpr double kRotationTolerance = 1e-9;

  // Validates K (upper triangular, K(2,2) = 1, positive focal lengths) and
  // R (orthonormal, det +1, to `rotation_tol`). Throws ValidationError.
  static CameraRig make(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size,
                        double rotation_tol = kRotationTolerance);

  static CameraRig from_intrinsics(double fx, double fy, double cx, double cy,
                                   const Mat3& R, const Vec3& t, ImageSize size);

  // Camera at `eye` looking at `target`, x right, y down (image rows grow
  // opposite to `up`).
  static CameraRig look_at(double fx, double fy, double cx, double cy, ImageSize size,
                           const Vec3& eye, const Vec3& target,
                           const Vec3& up = Vec3::UnitZ());

  const Mat3& K() const { return K_; }
  const Mat3& R() const { return R_; }
  const Vec3& t() const { return t_; }
  const Mat3& K_inverse() const { return K_inv_; }
  const Mat3& R_inverse() const { return R_inv_; }
  ImageSize image_size() const { return size_; }
  Vec3 center() const { return R_inv_ * (-t_); }

 private:
  CameraRig() = default;
  Mat3 K_ = Mat3::Identity();
  Mat3 R_ = Mat3::Identity();
  Vec3 t_ = Vec3::Zero();
  Mat3 K_inv_ = Mat3::Identity();
  Mat3 R_inv_ = Mat3::Identity();
  ImageSize size_;
};

// Rotation taking a forward-x / left-y / up-z frame (the SemanticKITTI grid
// frame) to the camera's right-x / down-y / forward-z frame.
Mat3 forward_x_rotation();

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // signed camera-frame z
};

// Throws DomainError when |depth| < 1e-12.
Projection project_point(const Vec3& p, const CameraRig& rig);

bool in_fov(double u, double v, double depth, const CameraRig& rig);

// Per voxel: does the centroid project inside the image in front of the camera?
BoolGrid fov_mask(const GridGeometry& geom, const CameraRig& rig);

// Inverse of project_point for depth d > 0 (DomainError otherwise).
Vec3 backproject_pixel(double u, double v, double d, const CameraRig& rig);

// Depth along the camera z axis, in meters; values <= 0 mark invalid pixels.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;  // row-major, depth[row * width + col]

  static DepthMap filled(int width, int height, double value);
  double at(int col, int row) const { return depth[static_cast<std::size_t>(row) * width + col]; }
  double& at(int col, int row) { return depth[static_cast<std::size_t>(row) * width + col]; }
  void validate() const;
};

// One point per valid pixel, sampled at the pixel center (col + 0.5,
// row + 0.5), in row-major order.
std::vector<Vec3> backproject_depthmap(const DepthMap& dm, const CameraRig& rig);

}  // namespace voxalign

#endif  // VOXALIGN_CAMERA_HPP
