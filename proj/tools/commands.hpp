// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_TOOLS_COMMANDS_HPP
#define VOXALIGN_TOOLS_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "run_config.hpp"
#include "voxalign/grid.hpp"
#include "voxalign/lift.hpp"

namespace voxalign::cli {

using Path = std::filesystem::path;

// Label inputs: *.label (raw ids through the config's mapping, with a sibling
// *.invalid when present), *.bin occupancy, or a grid container. Files in
// SemanticKITTI formats use the 256x256x32 volume; containers use the same
// metric volume resampled to their dims.
LabelGrid load_label_input(const Path& path, const RunConfig& cfg);
FeatureGrid load_score_input(const Path& path);

void run_csa(const RunConfig& cfg, const Path& labels_in, const Path& map_out, bool json,
             std::ostream& out);

void run_critical(const RunConfig& cfg, const Path& scores_in, const Path& csa_in,
                  const Path& set_out, const std::optional<Path>& low_scores_in, bool json,
                  std::ostream& out);

void run_circ(const RunConfig& cfg, const Path& scores_high_in, const Path& scores_low_in,
              const Path& set_in, const std::optional<Path>& grad_high_out,
              const std::optional<Path>& grad_low_out, bool json, std::ostream& out);

void run_eval(const RunConfig& cfg, const Path& pred_in, const Path& gt_in,
              const std::optional<Path>& calib_in, bool json, std::ostream& out);

void run_sparsity(const RunConfig& cfg, const Path& gt_in, const std::optional<Path>& csv_out,
                  bool json, std::ostream& out);

struct LiftInputs {
  std::vector<Path> feature_maps;
  std::vector<Path> calibs;  // one per map, or a single shared one
  std::optional<Path> proposals_high;
  std::optional<Path> proposals_low;
  Path grid_out;
  std::optional<Path> low_out;
};

void run_lift(const RunConfig& cfg, const LiftInputs& in, bool json, std::ostream& out);

void run_synth(const Path& spec_in, const Path& out_dir, bool json, std::ostream& out);

}  // namespace voxalign::cli

#endif  // VOXALIGN_TOOLS_COMMANDS_HPP
