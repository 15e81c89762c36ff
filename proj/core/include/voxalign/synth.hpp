// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_SYNTH_HPP
#define VOXALIGN_SYNTH_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "voxalign/camera.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/grid.hpp"

namespace voxalign {

// SplitMix64: state += 0x9e3779b97f4a7c15, then the
// standard xor-shift-multiply finalizer. Portable and bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform in [0, 1) from the top 53 bits.
  double uniform();
  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

// Half-open voxel boxes [min, max). Ground planes cover every (x, y) for
// z in [z, z + thickness).
struct Primitive {
  enum class Kind { Box, Ground };
  Kind kind = Kind::Box;
  Coord min;
  Coord max;
  std::int32_t z = 0;
  std::int32_t thickness = 1;
  Label label = 1;
};

// Boxes drawn from the seed after the listed primitives. Extents and corners
// are multiples of `align`.
struct RandomBoxes {
  std::int32_t count = 0;
  std::int32_t min_extent = 1;
  std::int32_t max_extent = 4;
  std::int32_t align = 1;
  std::vector<Label> labels;
};

struct CameraPlacement {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  ImageSize size;
  // look_at placement when set, otherwise explicit R and t.
  std::optional<Vec3> eye;
  Vec3 target = Vec3::Zero();
  Vec3 up = Vec3::UnitZ();
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  CameraRig rig() const;
};

struct SceneSpec {
  GridGeometry geometry;
  ClassTable table;
  std::vector<Primitive> primitives;
  std::optional<RandomBoxes> random_boxes;
  std::vector<CameraPlacement> cameras;
  std::uint64_t seed = 0;

  // Throws SpecError for out-of-bounds primitives or unknown labels.
  void validate() const;
  static SceneSpec from_json(std::string_view text);
};

struct Scene {
  LabelGrid labels;
  std::vector<CameraRig> rigs;
  std::vector<DepthMap> depths;
};

// Paints primitives in order (later ones overwrite), then renders one depth
// map per camera.
Scene generate_scene(const SceneSpec& spec);

// Per pixel, a ray through the pixel center is traversed voxel by voxel
// (3D DDA). The depth is the camera-frame z at the midpoint of the ray's chord
// through the first non-empty voxel, so back-projection lands inside that
// voxel. Chords shorter than 1e-9 voxel (grazing contacts) do not count.
// Pixels that hit nothing get depth 0.
DepthMap render_depth(const LabelGrid& labels, const CameraRig& rig);

// Reference implementations for tests. They share no code with the kernels
// they check.

// Literal enumeration of the 3x3x3 cube around every voxel.
AnisotropyMap oracle_csa(const LabelGrid& v_re, const CsaParams& params);

// Full sort by value descending, index ascending; first k indices.
std::vector<std::size_t> oracle_topk(std::span<const double> values, std::size_t k);

using ScalarFunction = std::function<double(std::span<const double>)>;

// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> oracle_grad(const ScalarFunction& f, std::span<const double> x, double h);

}  // namespace voxalign

#endif  // VOXALIGN_SYNTH_HPP
