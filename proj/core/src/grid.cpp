// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/grid.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "voxalign/error.hpp"

namespace voxalign {

void GridDims::validate() const {
  if (x <= 0 || y <= 0 || z <= 0) {
    throw ShapeError("grid dims must be positive, got " + to_string());
  }
  if (count() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ShapeError("grid " + to_string() + " exceeds 2^31 voxels");
  }
}

std::string GridDims::to_string() const {
  return std::to_string(x) + "x" + std::to_string(y) + "x" + std::to_string(z);
}

void GridGeometry::validate() const {
  dims.validate();
  if (!(voxel_size > 0.0)) throw ShapeError("voxel_size must be positive");
  if (!origin.allFinite()) throw ShapeError("grid origin must be finite");
}

GridGeometry GridGeometry::semantic_kitti() {
  return GridGeometry{GridDims{256, 256, 32}, Vec3(0.0, -25.6, -2.0), 0.2};
}

GridGeometry GridGeometry::kitti_volume(GridDims dims) {
  dims.validate();
  return GridGeometry{dims, Vec3(0.0, -25.6, -2.0), 51.2 / dims.x};
}

GridGeometry GridGeometry::coarsened(std::int32_t factor) const {
  if (factor <= 0 || dims.x % factor || dims.y % factor || dims.z % factor) {
    throw ShapeError("dims " + dims.to_string() + " not divisible by " +
                     std::to_string(factor));
  }
  return GridGeometry{GridDims{dims.x / factor, dims.y / factor, dims.z / factor},
                      origin, voxel_size * factor};
}

GridGeometry GridGeometry::refined(std::int32_t factor) const {
  if (factor <= 0) throw ShapeError("refinement factor must be positive");
  GridGeometry out{GridDims{dims.x * factor, dims.y * factor, dims.z * factor},
                   origin, voxel_size / factor};
  out.dims.validate();
  return out;
}

bool in_bounds(Coord p, GridDims dims) {
  return p.x >= 0 && p.y >= 0 && p.z >= 0 && p.x < dims.x && p.y < dims.y &&
         p.z < dims.z;
}

std::size_t linear_index(Coord p, GridDims dims) {
  if (!in_bounds(p, dims)) {
    throw BoundsError("voxel (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                      "," + std::to_string(p.z) + ") outside " + dims.to_string());
  }
  return (static_cast<std::size_t>(p.x) * dims.y + p.y) * dims.z + p.z;
}

Coord coord_of(std::size_t index, GridDims dims) {
  if (index >= dims.count()) {
    throw BoundsError("linear index " + std::to_string(index) + " outside " +
                      dims.to_string());
  }
  const auto z = static_cast<std::int32_t>(index % dims.z);
  index /= dims.z;
  const auto y = static_cast<std::int32_t>(index % dims.y);
  const auto x = static_cast<std::int32_t>(index / dims.y);
  return Coord{x, y, z};
}

Vec3 voxel_centroid(Coord p, const GridGeometry& geom) {
  if (!in_bounds(p, geom.dims)) {
    throw BoundsError("centroid requested for voxel outside " + geom.dims.to_string());
  }
  return geom.origin + geom.voxel_size * Vec3(p.x + 0.5, p.y + 0.5, p.z + 0.5);
}

Adjacency classify_offset(Coord offset) {
  const int nonzero = (offset.x != 0) + (offset.y != 0) + (offset.z != 0);
  switch (nonzero) {
    case 1: return Adjacency::Surface;
    case 2: return Adjacency::Edge;
    case 3: return Adjacency::Vertex;
    default: throw DomainError("offset is not a 26-neighbor");
  }
}

const std::array<NeighborOffset, 26>& neighborhood26() {
  static const std::array<NeighborOffset, 26> table = [] {
    std::array<NeighborOffset, 26> out{};
    std::size_t n = 0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Coord c{dx, dy, dz};
          out[n++] = NeighborOffset{c, classify_offset(c)};
        }
    return out;
  }();
  return table;
}

std::optional<Label> ClassTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Label>(i);
  }
  return std::nullopt;
}

void ClassTable::validate() const {
  if (names.size() < 2) throw ValidationError("class table needs at least 2 classes");
  if (names.size() > std::numeric_limits<Label>::max()) {
    throw ValidationError("class table exceeds 16-bit label range");
  }
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) throw ValidationError("duplicate class name '" + n + "'");
  }
}

ClassTable ClassTable::semantic_kitti() {
  return ClassTable{{"empty", "car", "bicycle", "motorcycle", "truck",
                     "other-vehicle", "person", "bicyclist", "motorcyclist",
                     "road", "parking", "sidewalk", "other-ground", "building",
                     "fence", "vegetation", "trunk", "terrain", "pole",
                     "traffic-sign"}};
}

ClassTable ClassTable::kitti360() {
  return ClassTable{{"empty", "car", "bicycle", "motorcycle", "truck",
                     "other-vehicle", "person", "road", "parking", "sidewalk",
                     "other-ground", "building", "fence", "vegetation",
                     "terrain", "pole", "traffic-sign", "other-structure",
                     "other-object"}};
}

BoolGrid BoolGrid::filled(GridDims dims, bool value) {
  return BoolGrid{dims, std::vector<std::uint8_t>(dims.count(), value ? 1 : 0)};
}

std::size_t BoolGrid::count_true() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](std::uint8_t v) { return v != 0; }));
}

LabelGrid LabelGrid::filled(const GridGeometry& geometry, Label value) {
  geometry.validate();
  return LabelGrid{geometry, std::vector<Label>(geometry.dims.count(), value),
                   std::nullopt};
}

void LabelGrid::validate() const {
  geometry.validate();
  if (labels.size() != geometry.dims.count()) {
    throw ShapeError("label array has " + std::to_string(labels.size()) +
                     " entries, grid " + geometry.dims.to_string() + " needs " +
                     std::to_string(geometry.dims.count()));
  }
  if (invalid_mask && invalid_mask->size() != labels.size()) {
    throw ShapeError("invalid mask size does not match label grid");
  }
}

void LabelGrid::validate(const ClassTable& table) const {
  validate();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= table.count()) {
      throw MappingError("label " + std::to_string(labels[i]) + " at voxel " +
                         std::to_string(i) + " outside class table of " +
                         std::to_string(table.count()));
    }
  }
}

void ResolutionPair::validate() const {
  high.validate();
  low.validate();
  if (lambda <= 0 || high.x != lambda * low.x || high.y != lambda * low.y ||
      high.z != lambda * low.z) {
    throw ShapeError("resolution pair " + high.to_string() + " / " + low.to_string() +
                     " is not related by ratio " + std::to_string(lambda));
  }
}

ResolutionPair ResolutionPair::make(GridDims high, GridDims low) {
  high.validate();
  low.validate();
  if (high.x % low.x != 0) {
    throw ShapeError("high resolution " + high.to_string() +
                     " is not an integer multiple of " + low.to_string());
  }
  ResolutionPair pair{high, low, high.x / low.x};
  pair.validate();
  return pair;
}

LabelGrid rescale_labels(const LabelGrid& grid, std::int32_t factor) {
  grid.validate();
  if (factor <= 0) throw ShapeError("rescale factor must be positive");
  const GridGeometry out_geom = grid.geometry.coarsened(factor);
  const GridDims in = grid.geometry.dims;
  const GridDims out = out_geom.dims;

  LabelGrid result = LabelGrid::filled(out_geom, ClassTable::kEmpty);
  if (grid.invalid_mask) result.invalid_mask.emplace(out.count(), 0);

  std::vector<std::pair<Label, int>> votes;
  votes.reserve(static_cast<std::size_t>(factor) * factor * factor);

  for (std::int32_t ox = 0; ox < out.x; ++ox)
    for (std::int32_t oy = 0; oy < out.y; ++oy)
      for (std::int32_t oz = 0; oz < out.z; ++oz) {
        bool any_valid = false;
        for (std::int32_t dx = 0; dx < factor && !any_valid; ++dx)
          for (std::int32_t dy = 0; dy < factor && !any_valid; ++dy)
            for (std::int32_t dz = 0; dz < factor; ++dz) {
              const std::size_t i = linear_index(
                  {ox * factor + dx, oy * factor + dy, oz * factor + dz}, in);
              if (!grid.is_invalid(i)) {
                any_valid = true;
                break;
              }
            }

        votes.clear();
        for (std::int32_t dx = 0; dx < factor; ++dx)
          for (std::int32_t dy = 0; dy < factor; ++dy)
            for (std::int32_t dz = 0; dz < factor; ++dz) {
              const std::size_t i = linear_index(
                  {ox * factor + dx, oy * factor + dy, oz * factor + dz}, in);
              if (any_valid && grid.is_invalid(i)) continue;
              const Label l = grid.labels[i];
              auto it = std::find_if(votes.begin(), votes.end(),
                                     [l](const auto& v) { return v.first == l; });
              if (it == votes.end()) {
                votes.emplace_back(l, 1);
              } else {
                ++it->second;
              }
            }

        // Highest count wins; ties prefer non-empty, then the smaller id.
        auto better = [](const std::pair<Label, int>& a, const std::pair<Label, int>& b) {
          if (a.second != b.second) return a.second > b.second;
          const bool a_empty = a.first == ClassTable::kEmpty;
          const bool b_empty = b.first == ClassTable::kEmpty;
          if (a_empty != b_empty) return !a_empty;
          return a.first < b.first;
        };
        const auto best = std::min_element(votes.begin(), votes.end(), better);
        const std::size_t o = linear_index({ox, oy, oz}, out);
        result.labels[o] = best->first;
        if (result.invalid_mask && !any_valid) (*result.invalid_mask)[o] = 1;
      }
  return result;
}

}  // namespace voxalign
