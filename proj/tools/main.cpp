// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "run_config.hpp"
#include "voxalign/error.hpp"
#include "voxalign/parallel.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace voxalign;
  using namespace voxalign::cli;

  CLI::App app{"voxalign: voxel supervision toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<Path> config_path;
  bool json = false;
  unsigned threads = 0;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_flag("--json", json, "Machine-readable JSON output");
  app.add_option("--threads", threads, "Worker threads (default: VOXALIGN_THREADS or 1)")
      ->check(CLI::Range(1u, 1024u));

  Path a, b, c, d;
  std::optional<Path> opt_a, opt_b;
  LiftInputs lift;

  auto* csa = app.add_subcommand("csa", "Cubic anisotropy map from a label grid");
  csa->add_option("labels", a, "Label grid")->required();
  csa->add_option("map-out", b, "Anisotropy container to write")->required();

  auto* critical = app.add_subcommand("critical", "Select critical voxels");
  critical->add_option("scores", a, "High-resolution score grid")->required();
  critical->add_option("csa", b, "Anisotropy container")->required();
  critical->add_option("set-out", c, "Critical set JSON to write")->required();
  critical->add_option("--low-scores", opt_a, "Low-resolution scores (independent pairing)");

  auto* circ = app.add_subcommand("circ", "Circulated loss over a critical set");
  circ->add_option("scores-high", a, "High-resolution score grid")->required();
  circ->add_option("scores-low", b, "Low-resolution score grid")->required();
  circ->add_option("set", c, "Critical set JSON")->required();
  circ->add_option("--grad-high", opt_a, "Write the high-resolution score gradient");
  circ->add_option("--grad-low", opt_b, "Write the low-resolution score gradient");

  auto* eval = app.add_subcommand("eval", "IoU / mIoU of a prediction against ground truth");
  eval->add_option("pred", a, "Predicted labels")->required();
  eval->add_option("gt", b, "Ground-truth labels")->required();
  eval->add_option("--calib", opt_a, "calib.txt for range splits");

  auto* sparsity = app.add_subcommand("sparsity", "Class histogram and empty fraction");
  sparsity->add_option("gt", a, "Ground-truth labels")->required();
  sparsity->add_option("--csv", opt_a, "Write the histogram as CSV");

  auto* lift_cmd = app.add_subcommand("lift", "Lift 2D feature maps into fused voxel features");
  lift_cmd->add_option("featmaps", lift.feature_maps, "Feature map containers")->required();
  lift_cmd->add_option("--calib", lift.calibs, "calib.txt, shared or one per map")->required();
  lift_cmd->add_option("--proposals-high", lift.proposals_high, "High-resolution proposal scores");
  lift_cmd->add_option("--proposals-low", lift.proposals_low, "Low-resolution proposal scores");
  lift_cmd->add_option("-o,--out", lift.grid_out, "High-resolution feature grid")->required();
  lift_cmd->add_option("--out-low", lift.low_out, "Low-resolution feature grid");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  synth->add_option("spec", a, "Scene spec JSON")->required();
  synth->add_option("out-dir", b, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    set_num_threads(threads);
    std::ostream& out = std::cout;
    if (synth->parsed()) {
      run_synth(a, b, json, out);
      return 0;
    }
    const RunConfig cfg = load_run_config(config_path);
    if (csa->parsed()) run_csa(cfg, a, b, json, out);
    if (critical->parsed()) run_critical(cfg, a, b, c, opt_a, json, out);
    if (circ->parsed()) run_circ(cfg, a, b, c, opt_a, opt_b, json, out);
    if (eval->parsed()) run_eval(cfg, a, b, opt_a, json, out);
    if (sparsity->parsed()) run_sparsity(cfg, a, opt_a, json, out);
    if (lift_cmd->parsed()) run_lift(cfg, lift, json, out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
