// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_LIFT_HPP
#define VOXALIGN_LIFT_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "voxalign/camera.hpp"
#include "voxalign/grid.hpp"

namespace voxalign {

// Image-plane feature map. Cell (col, row) covers full-image pixels
// [col * downscale, (col + 1) * downscale) horizontally, likewise vertically.
struct FeatureMap2D {
  int width = 0;
  int height = 0;
  int channels = 0;
  double downscale = 16.0;
  std::vector<double> values;  // ((row * width) + col) * channels + c

  static FeatureMap2D filled(int width, int height, int channels, double value,
                             double downscale = 16.0);
  double at(int col, int row, int c) const {
    return values[(static_cast<std::size_t>(row) * width + col) * channels + c];
  }
  void validate() const;
};

// Bilinear sample at continuous cell coordinates (x, y), cell centers at
// integer coordinates, clamped to the border.
void bilinear_sample(const FeatureMap2D& map, double x, double y, std::span<double> out);

struct FeatureGrid {
  GridGeometry geometry;
  int channels = 0;
  std::vector<double> values;  // voxel * channels + c

  static FeatureGrid zeros(const GridGeometry& geometry, int channels);

  std::span<double> row(std::size_t voxel) {
    return {values.data() + voxel * channels, static_cast<std::size_t>(channels)};
  }
  std::span<const double> row(std::size_t voxel) const {
    return {values.data() + voxel * channels, static_cast<std::size_t>(channels)};
  }
  void validate() const;
};

// One occupancy score in [0, 1] per voxel.
struct ScoreGrid {
  GridGeometry geometry;
  std::vector<double> scores;

  void validate() const;
};

struct SeedSet {
  std::vector<std::size_t> indices;  // strictly increasing
  int channels = 0;
  std::vector<double> features;  // seed * channels + c

  std::size_t size() const { return indices.size(); }
};

// Projects every voxel centroid into each (map, rig) frame and averages the
// bilinear samples over the frames that see it; voxels seen by no frame get
// the zero vector.
FeatureGrid sample_features(std::span<const FeatureMap2D> maps,
                            std::span<const CameraRig> rigs, const GridGeometry& geom);

// Voxels with proposal score strictly above theta, in linear-index order.
SeedSet select_seeds(const FeatureGrid& feat, const ScoreGrid& proposals, double theta);

// Dense grid holding the seed rows, zero elsewhere.
FeatureGrid scatter_seeds(const SeedSet& seeds, const GridGeometry& geometry);

// Trilinear upsampling with half-pixel centers: output cell o samples input
// coordinate (o + 0.5) / factor - 0.5, clamped to the border.
FeatureGrid upsample_trilinear(const FeatureGrid& feat, std::int32_t factor);

// Block mean over factor^3 children.
FeatureGrid downsample_avgpool(const FeatureGrid& feat, std::int32_t factor);

enum class FuseMode {
  Sequential,    // high += Up(low); low += Down(updated high)
  Simultaneous,  // both updates read the inputs
};

std::pair<FeatureGrid, FeatureGrid> fuse_seeds(const FeatureGrid& high,
                                               const FeatureGrid& low,
                                               const ResolutionPair& pair,
                                               FuseMode mode = FuseMode::Sequential);

}  // namespace voxalign

#endif  // VOXALIGN_LIFT_HPP
