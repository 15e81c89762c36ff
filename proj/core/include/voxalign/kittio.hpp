// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_KITTIO_HPP
#define VOXALIGN_KITTIO_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxalign/camera.hpp"
#include "voxalign/cda.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/grid.hpp"
#include "voxalign/lift.hpp"

namespace voxalign {

using Bytes = std::vector<std::uint8_t>;

Bytes read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// ---------------------------------------------------------------------------
// SemanticKITTI voxel files (<seq>/voxels/<frame>.bin|.label|.invalid).
//
// .bin and .invalid pack one bit per voxel, most significant bit first, in
// x-major voxel order; .label stores one little-endian uint16 per voxel.

// Raw dataset id -> contiguous training id, plus the class names.
struct LabelMapping {
  std::map<std::uint32_t, Label> raw_to_train;
  ClassTable table;

  static LabelMapping semantic_kitti();
  static LabelMapping identity(const ClassTable& table);
  // {"names": [...], "map": {"<raw id>": <train id>, ...}}
  static LabelMapping from_json(std::string_view text);

  // Throws MappingError naming the id.
  Label map(std::uint32_t raw) const;
};

BoolGrid unpack_bits(std::span<const std::uint8_t> bytes, GridDims dims);
Bytes pack_bits(const BoolGrid& grid);

LabelGrid read_occupancy_bin(std::span<const std::uint8_t> bytes,
                             const GridGeometry& geom = GridGeometry::semantic_kitti());
Bytes write_occupancy_bin(const LabelGrid& grid);

LabelGrid read_labels(std::span<const std::uint8_t> bytes, const LabelMapping& mapping,
                      const GridGeometry& geom = GridGeometry::semantic_kitti());
// Writes the stored ids verbatim (training ids).
Bytes write_labels(const LabelGrid& grid);

struct VoxelFileBundle {
  std::optional<std::filesystem::path> occupancy;  // .bin
  std::optional<std::filesystem::path> labels;     // .label
  std::optional<std::filesystem::path> invalid;    // .invalid

  // <dir>/<frame>.{bin,label,invalid}, keeping only files that exist.
  static VoxelFileBundle discover(const std::filesystem::path& voxel_dir,
                                  const std::string& frame);
};

// Labels come from .label when present, otherwise from .bin occupancy
// (class 1 = occupied). .invalid becomes the invalid mask.
LabelGrid load_voxel_bundle(const VoxelFileBundle& bundle, const LabelMapping& mapping,
                            const GridGeometry& geom = GridGeometry::semantic_kitti());

// ---------------------------------------------------------------------------
// KITTI calib.txt: "KEY: v0 ... v11" rows. K is the left 3x3 of P2, [R|t]
// comes from Tr, and P2's fourth column is folded into t so that the rig
// projects exactly like P2 * Tr.

inline constexpr ImageSize kKittiImageSize{1220, 370};

CameraRig read_calibration(std::string_view text, ImageSize size = kKittiImageSize);
std::string write_calibration(const CameraRig& rig);

// ---------------------------------------------------------------------------
// Grid container: little-endian header
//   "VXAL" | version u16 | kind u8 | dims 3 x u32 | channels u32 | elem u8
// followed by the payload (voxel-major, channel-minor) and a CRC-32 (IEEE)
// of everything before it.

inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 24;

enum class PayloadKind : std::uint8_t { Labels = 1, Scores = 2, Features = 3, Anisotropy = 4 };
enum class ElementType : std::uint8_t { U16 = 1, F32 = 2, F64 = 3, Bool = 4 };

std::size_t element_size(ElementType type);

struct GridContainer {
  PayloadKind kind = PayloadKind::Features;
  ElementType element = ElementType::F64;
  GridDims dims;
  std::uint32_t channels = 0;
  Bytes payload;

  void validate() const;
};

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

Bytes write_container(const GridContainer& container);
GridContainer read_container(std::span<const std::uint8_t> bytes);

// Typed packing. Label grids carry their invalid mask as a second channel;
// anisotropy maps store (surface, edge, vertex, csa) as four f64 channels;
// 2D images use dims (height, width, 1) so voxel order equals row-major.
GridContainer to_container(const LabelGrid& grid);
GridContainer to_container(const BoolGrid& grid);
GridContainer to_container(const ScoreGrid& grid, ElementType element = ElementType::F64);
GridContainer to_container(const FeatureGrid& grid, ElementType element = ElementType::F64);
GridContainer to_container(const AnisotropyMap& map);
GridContainer to_container(const FeatureMap2D& map, ElementType element = ElementType::F64);
GridContainer to_container(const DepthMap& map);
GridContainer to_container(const Matrix& matrix);

// Unpacking checks the payload kind and that dims match `geometry`.
LabelGrid labels_from_container(const GridContainer& c, const GridGeometry& geometry);
BoolGrid mask_from_container(const GridContainer& c);
ScoreGrid scores_from_container(const GridContainer& c, const GridGeometry& geometry);
FeatureGrid features_from_container(const GridContainer& c, const GridGeometry& geometry);
AnisotropyMap anisotropy_from_container(const GridContainer& c, const GridGeometry& geometry);
FeatureMap2D feature_map_from_container(const GridContainer& c, double downscale);
DepthMap depth_map_from_container(const GridContainer& c);
Matrix matrix_from_container(const GridContainer& c);

// ---------------------------------------------------------------------------
// Critical sets: JSON index list; distributions travel as a Matrix container.

struct CriticalSetFile {
  GridDims high_resolution;
  GridDims low_resolution;
  std::int32_t lambda = 1;
  std::vector<std::size_t> high_indices;
  std::vector<std::size_t> low_indices;
  std::vector<double> ranking_score;
};

std::string critical_set_json(const CriticalSetFile& set);
CriticalSetFile parse_critical_set_json(std::string_view text);

}  // namespace voxalign

#endif  // VOXALIGN_KITTIO_HPP
