// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/camera.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "voxalign/error.hpp"
#include "voxalign/parallel.hpp"

namespace voxalign {

CameraRig CameraRig::make(const Mat3& K, const Mat3& R, const Vec3& t, ImageSize size,
                          double rotation_tol) {
  if (!K.allFinite() || !R.allFinite() || !t.allFinite()) {
    throw ValidationError("camera parameters must be finite");
  }
  if (K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0 || K(2, 2) != 1.0) {
    throw ValidationError("intrinsics must be upper triangular with K[2][2] = 1");
  }
  if (!(K(0, 0) > 0.0) || !(K(1, 1) > 0.0)) {
    throw ValidationError("intrinsics need positive focal lengths");
  }
  const double ortho_err = (R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > rotation_tol) {
    throw ValidationError("rotation is not orthonormal (max deviation " +
                          std::to_string(ortho_err) + ")");
  }
  if (std::abs(R.determinant() - 1.0) > rotation_tol) {
    throw ValidationError("rotation determinant is not +1");
  }
  if (size.width <= 0 || size.height <= 0) {
    throw ValidationError("image size must be positive");
  }

  CameraRig rig;
  rig.K_ = K;
  rig.R_ = R;
  rig.t_ = t;
  rig.size_ = size;
  const auto k_lu = K.fullPivLu();
  if (!k_lu.isInvertible()) throw MatrixError("intrinsics matrix is singular");
  rig.K_inv_ = k_lu.inverse();
  rig.R_inv_ = R.fullPivLu().inverse();
  return rig;
}

CameraRig CameraRig::from_intrinsics(double fx, double fy, double cx, double cy,
                                     const Mat3& R, const Vec3& t, ImageSize size) {
  Mat3 K;
  K << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return make(K, R, t, size);
}

CameraRig CameraRig::look_at(double fx, double fy, double cx, double cy, ImageSize size,
                             const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = target - eye;
  if (forward.norm() == 0.0) throw ValidationError("look_at target equals eye");
  const Vec3 z_axis = forward.normalized();
  const Vec3 right = z_axis.cross(up);
  if (right.norm() < 1e-12) throw ValidationError("look_at up vector is parallel to view");
  const Vec3 x_axis = right.normalized();
  const Vec3 y_axis = z_axis.cross(x_axis);

  Mat3 R;
  R.row(0) = x_axis.transpose();
  R.row(1) = y_axis.transpose();
  R.row(2) = z_axis.transpose();
  return from_intrinsics(fx, fy, cx, cy, R, -R * eye, size);
}

Mat3 forward_x_rotation() {
  Mat3 R;
  R << 0.0, -1.0, 0.0,
       0.0, 0.0, -1.0,
       1.0, 0.0, 0.0;
  return R;
}

Projection project_point(const Vec3& p, const CameraRig& rig) {
  const Vec3 cam = rig.R() * p + rig.t();
  const double z = cam.z();
  if (std::abs(z) < 1e-12) {
    throw DomainError("point lies on the camera plane (z_cam = " + std::to_string(z) + ")");
  }
  const Vec3 pix = rig.K() * cam;
  return Projection{pix.x() / z, pix.y() / z, z};
}

bool in_fov(double u, double v, double depth, const CameraRig& rig) {
  const ImageSize s = rig.image_size();
  return depth > 0.0 && u >= 0.0 && v >= 0.0 && u < s.width && v < s.height;
}

BoolGrid fov_mask(const GridGeometry& geom, const CameraRig& rig) {
  geom.validate();
  BoolGrid mask = BoolGrid::filled(geom.dims, false);
  const GridDims d = geom.dims;
  parallel_for(0, static_cast<std::size_t>(d.x), [&](std::size_t lo, std::size_t hi) {
    for (auto x = static_cast<std::int32_t>(lo); x < static_cast<std::int32_t>(hi); ++x)
      for (std::int32_t y = 0; y < d.y; ++y)
        for (std::int32_t z = 0; z < d.z; ++z) {
          const Coord c{x, y, z};
          const Vec3 centroid = voxel_centroid(c, geom);
          if (std::abs((rig.R() * centroid + rig.t()).z()) < 1e-12) continue;
          const Projection pr = project_point(centroid, rig);
          mask.values[linear_index(c, d)] = in_fov(pr.u, pr.v, pr.depth, rig) ? 1 : 0;
        }
  });
  return mask;
}

Vec3 backproject_pixel(double u, double v, double d, const CameraRig& rig) {
  if (!(d > 0.0)) {
    throw DomainError("back-projection needs positive depth, got " + std::to_string(d));
  }
  const Vec3 cam = rig.K_inverse() * Vec3(d * u, d * v, d);
  return rig.R_inverse() * (cam - rig.t());
}

DepthMap DepthMap::filled(int width, int height, double value) {
  if (width <= 0 || height <= 0) throw ShapeError("depth map size must be positive");
  return DepthMap{width, height,
                  std::vector<double>(static_cast<std::size_t>(width) * height, value)};
}

void DepthMap::validate() const {
  if (width <= 0 || height <= 0) throw ShapeError("depth map size must be positive");
  if (depth.size() != static_cast<std::size_t>(width) * height) {
    throw ShapeError("depth map holds " + std::to_string(depth.size()) + " values, expected " +
                     std::to_string(static_cast<std::size_t>(width) * height));
  }
  for (double z : depth) {
    if (!std::isfinite(z)) throw DomainError("depth map contains non-finite values");
  }
}

std::vector<Vec3> backproject_depthmap(const DepthMap& dm, const CameraRig& rig) {
  dm.validate();
  std::vector<Vec3> cloud;
  for (int row = 0; row < dm.height; ++row)
    for (int col = 0; col < dm.width; ++col) {
      const double d = dm.at(col, row);
      if (d <= 0.0) continue;
      cloud.push_back(backproject_pixel(col + 0.5, row + 0.5, d, rig));
    }
  return cloud;
}

}  // namespace voxalign
