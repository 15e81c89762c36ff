// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_GRID_HPP
#define VOXALIGN_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace voxalign {

using Vec3 = Eigen::Vector3d;
using Label = std::uint16_t;

// Voxel counts along x, y, z. Linearization is x-major:
// idx = x * (Y * Z) + y * Z + z.
struct GridDims {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(y) *
           static_cast<std::size_t>(z);
  }
  bool operator==(const GridDims&) const = default;

  // Throws ShapeError unless all extents are positive and the voxel count
  // fits in a signed 32-bit index.
  void validate() const;
  std::string to_string() const;
};

struct Coord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;
  bool operator==(const Coord&) const = default;
};

// Metric placement: `origin` is the minimum corner of voxel (0,0,0).
struct GridGeometry {
  GridDims dims;
  Vec3 origin = Vec3::Zero();
  double voxel_size = 1.0;

  void validate() const;

  // 256x256x32 at 0.2 m covering [0, 51.2] x [-25.6, 25.6] x [-2, 4.4].
  static GridGeometry semantic_kitti();
  // The SemanticKITTI volume resampled to `dims` (voxel size 51.2 / dims.x).
  static GridGeometry kitti_volume(GridDims dims);

  GridGeometry coarsened(std::int32_t factor) const;
  GridGeometry refined(std::int32_t factor) const;
};

std::size_t linear_index(Coord p, GridDims dims);
Coord coord_of(std::size_t index, GridDims dims);
bool in_bounds(Coord p, GridDims dims);
Vec3 voxel_centroid(Coord p, const GridGeometry& geom);

enum class Adjacency : std::uint8_t { Surface, Edge, Vertex };

struct NeighborOffset {
  Coord offset;
  Adjacency adjacency;
};

// The 26 offsets of the 3x3x3 cube around any voxel, tagged by how many axes
// are nonzero (1: Surface, 2: Edge, 3: Vertex). Counts are 6 / 12 / 8.
const std::array<NeighborOffset, 26>& neighborhood26();
Adjacency classify_offset(Coord offset);

// Class 0 is always "empty".
struct ClassTable {
  static constexpr Label kEmpty = 0;
  std::vector<std::string> names;

  std::size_t count() const { return names.size(); }
  std::optional<Label> find(const std::string& name) const;
  void validate() const;

  // empty + the 19 SemanticKITTI training classes.
  static ClassTable semantic_kitti();
  // empty + the 18 SSCBench-KITTI-360 classes.
  static ClassTable kitti360();
};

struct BoolGrid {
  GridDims dims;
  std::vector<std::uint8_t> values;

  static BoolGrid filled(GridDims dims, bool value);
  bool at(std::size_t i) const { return values[i] != 0; }
  std::size_t count_true() const;
};

struct LabelGrid {
  GridGeometry geometry;
  std::vector<Label> labels;
  // Invalid voxels never appear as a class id; loss and metric code skip
  // them through this mask.
  std::optional<std::vector<std::uint8_t>> invalid_mask;

  static LabelGrid filled(const GridGeometry& geometry, Label value);

  GridDims dims() const { return geometry.dims; }
  bool is_invalid(std::size_t i) const {
    return invalid_mask.has_value() && (*invalid_mask)[i] != 0;
  }
  Label at(Coord p) const { return labels[linear_index(p, geometry.dims)]; }
  Label& at(Coord p) { return labels[linear_index(p, geometry.dims)]; }

  // Shape consistency; throws ShapeError.
  void validate() const;
  // Every label < table.count(); throws MappingError naming the offender.
  void validate(const ClassTable& table) const;
};

// Two levels related by an integer ratio on every axis.
struct ResolutionPair {
  GridDims high;
  GridDims low;
  std::int32_t lambda = 1;

  static ResolutionPair make(GridDims high, GridDims low);
  void validate() const;
};

// Majority vote over each factor^3 block. Ties prefer a non-empty label, then
// the smallest class id. Votes count valid children only, unless the whole
// block is invalid, in which case the output voxel is invalid and votes
// count every child.
LabelGrid rescale_labels(const LabelGrid& grid, std::int32_t factor);

}  // namespace voxalign

#endif  // VOXALIGN_GRID_HPP
