// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_TOOLS_RUN_CONFIG_HPP
#define VOXALIGN_TOOLS_RUN_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voxalign/camera.hpp"
#include "voxalign/cda.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/grid.hpp"
#include "voxalign/kittio.hpp"
#include "voxalign/lift.hpp"
#include "voxalign/metrics.hpp"

namespace voxalign::cli {

// Every field defaults to the reference training setup. Unknown keys at any
// level raise ConfigError.
struct RunConfig {
  CsaParams csa;
  // "semantic_kitti", "kitti360", or explicit class names.
  ClassTable classes = ClassTable::semantic_kitti();
  // Raw-id mapping for .label inputs; defaults to the built-in SemanticKITTI map.
  std::optional<std::filesystem::path> label_mapping;
  // Preset name ("C0".."C3") or an inline groups object.
  std::string groups = "C2";
  std::optional<std::string> groups_json;
  double theta = 0.5;
  std::size_t k = 4096;
  double gamma = 1.0;
  GridDims high{128, 128, 16};
  GridDims low{64, 64, 8};
  FuseMode fuse_mode = FuseMode::Sequential;
  CsaResample csa_resample = CsaResample::Max;
  Pairing pairing = Pairing::Correspondence;
  std::vector<double> range_splits;
  AbsentClassPolicy absent_class = AbsentClassPolicy::Zero;
  double feature_downscale = 16.0;
  ImageSize image_size = kKittiImageSize;

  ResolutionPair resolution_pair() const { return ResolutionPair::make(high, low); }
  SemanticGroups semantic_groups() const;
  LabelMapping mapping() const;
  void validate() const;
};

RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::optional<std::filesystem::path>& path);

}  // namespace voxalign::cli

#endif  // VOXALIGN_TOOLS_RUN_CONFIG_HPP
