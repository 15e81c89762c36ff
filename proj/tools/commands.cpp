// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "voxalign/camera.hpp"
#include "voxalign/cda.hpp"
#include "voxalign/csa.hpp"
#include "voxalign/error.hpp"
#include "voxalign/kittio.hpp"
#include "voxalign/metrics.hpp"
#include "voxalign/synth.hpp"

namespace voxalign::cli {
namespace {

using ojson = nlohmann::ordered_json;

double rounded(double v) { return std::round(v * 1e6) / 1e6; }

std::string row(const std::string& key, const std::string& value) {
  std::string k = key;
  if (k.size() < 18) k.resize(18, ' ');
  return k + value + "\n";
}

// Re-raises library errors with the offending path in front, keeping the
// exit-code class.
template <typename F>
auto with_path(const Path& path, F&& f) -> decltype(f()) {
  const std::string where = path.string() + ": ";
  try {
    return f();
  } catch (const FormatError& e) {
    throw FormatError(where + e.what());
  } catch (const ParseError& e) {
    throw ParseError(where + e.what());
  } catch (const IoError& e) {
    throw IoError(where + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(where + e.what());
  }
}

GridContainer load_container(const Path& path) {
  return with_path(path, [&] { return read_container(read_file(path)); });
}

void save_container(const Path& path, const GridContainer& c) {
  with_path(path, [&] { write_file(path, write_container(c)); });
}

CameraRig default_rig(const RunConfig& cfg) {
  const double cx = cfg.image_size.width / 2.0;
  const double cy = cfg.image_size.height / 2.0;
  return CameraRig::from_intrinsics(cx, cx, cx, cy, forward_x_rotation(), Vec3::Zero(),
                                    cfg.image_size);
}

CameraRig load_calib(const Path& path, const RunConfig& cfg) {
  return with_path(path, [&] { return read_calibration(read_text_file(path), cfg.image_size); });
}

}  // namespace

LabelGrid load_label_input(const Path& path, const RunConfig& cfg) {
  const std::string ext = path.extension().string();
  if (ext == ".label" || ext == ".bin") {
    VoxelFileBundle bundle;
    if (ext == ".label") {
      bundle.labels = path;
    } else {
      bundle.occupancy = path;
    }
    Path invalid = path;
    invalid.replace_extension(".invalid");
    if (std::filesystem::exists(invalid)) bundle.invalid = invalid;
    const LabelMapping mapping = cfg.mapping();
    return with_path(path, [&] { return load_voxel_bundle(bundle, mapping); });
  }
  const GridContainer c = load_container(path);
  return with_path(path, [&] {
    LabelGrid g = labels_from_container(c, GridGeometry::kitti_volume(c.dims));
    g.validate(cfg.classes);
    return g;
  });
}

FeatureGrid load_score_input(const Path& path) {
  const GridContainer c = load_container(path);
  return with_path(path,
                   [&] { return features_from_container(c, GridGeometry::kitti_volume(c.dims)); });
}

void run_csa(const RunConfig& cfg, const Path& labels_in, const Path& map_out, bool json,
             std::ostream& out) {
  const LabelGrid labels = load_label_input(labels_in, cfg);
  const SemanticGroups groups = cfg.semantic_groups();
  const AnisotropyMap map = cubic_anisotropy(reassign(labels, groups), cfg.csa);
  save_container(map_out, to_container(map));

  const double mean =
      std::accumulate(map.s_csa.begin(), map.s_csa.end(), 0.0) / static_cast<double>(map.s_csa.size());
  const double peak = *std::max_element(map.s_csa.begin(), map.s_csa.end());
  if (json) {
    ojson doc;
    doc["voxels"] = map.s_csa.size();
    doc["groups"] = groups.name;
    doc["mean_csa"] = rounded(mean);
    doc["max_csa"] = rounded(peak);
    out << doc.dump(2) << "\n";
  } else {
    out << row("voxels", std::to_string(map.s_csa.size())) << row("groups", groups.name)
        << row("mean csa", format_number(mean)) << row("max csa", format_number(peak));
  }
}

void run_critical(const RunConfig& cfg, const Path& scores_in, const Path& csa_in,
                  const Path& set_out, const std::optional<Path>& low_scores_in, bool json,
                  std::ostream& out) {
  const FeatureGrid scores = load_score_input(scores_in);
  const GridContainer csa_c = load_container(csa_in);
  const AnisotropyMap csa = with_path(csa_in, [&] {
    return anisotropy_from_container(csa_c, GridGeometry::kitti_volume(csa_c.dims));
  });
  const ResolutionPair pair = ResolutionPair::make(scores.geometry.dims, cfg.low);

  const ScoreGrid conf_high = occupancy_confidence(scores);
  const RealGrid csa_high = csa_to_resolution(csa, pair.high, cfg.csa_resample);
  CriticalSet high;
  std::vector<std::size_t> low_indices;
  if (cfg.pairing == Pairing::Correspondence) {
    high = select_critical(conf_high, csa_high, cfg.k);
    low_indices = pair_across_resolutions(high.indices, pair);
  } else {
    if (!low_scores_in) {
      throw ConfigError("independent pairing needs --low-scores");
    }
    const FeatureGrid low_scores = load_score_input(*low_scores_in);
    const CriticalPairs pairs = select_critical_pairs(
        conf_high, csa_high, occupancy_confidence(low_scores),
        csa_to_resolution(csa, pair.low, cfg.csa_resample), cfg.k, pair, Pairing::Independent);
    high = pairs.high;
    low_indices = pairs.low.indices;
  }

  CriticalSetFile file{pair.high, pair.low, pair.lambda, high.indices, low_indices,
                       high.ranking_score};
  with_path(set_out, [&] { write_text_file(set_out, critical_set_json(file)); });

  if (json) {
    ojson doc;
    doc["k"] = high.indices.size();
    doc["lambda"] = pair.lambda;
    doc["top_score"] = rounded(high.ranking_score.front());
    doc["min_score"] = rounded(high.ranking_score.back());
    out << doc.dump(2) << "\n";
  } else {
    out << row("k", std::to_string(high.indices.size())) << row("lambda", std::to_string(pair.lambda))
        << row("top score", format_number(high.ranking_score.front()))
        << row("min score", format_number(high.ranking_score.back()));
  }
}

void run_circ(const RunConfig& cfg, const Path& scores_high_in, const Path& scores_low_in,
              const Path& set_in, const std::optional<Path>& grad_high_out,
              const std::optional<Path>& grad_low_out, bool json, std::ostream& out) {
  const FeatureGrid high = load_score_input(scores_high_in);
  const FeatureGrid low = load_score_input(scores_low_in);
  const CriticalSetFile set =
      with_path(set_in, [&] { return parse_critical_set_json(read_text_file(set_in)); });
  if (!(set.high_resolution == high.geometry.dims) || !(set.low_resolution == low.geometry.dims)) {
    throw ShapeError("critical set resolutions " + set.high_resolution.to_string() + " / " +
                     set.low_resolution.to_string() + " do not match the score grids " +
                     high.geometry.dims.to_string() + " / " + low.geometry.dims.to_string());
  }
  const AlignmentReport report =
      critical_alignment(high, low, set.high_indices, set.low_indices);
  if (grad_high_out) {
    save_container(*grad_high_out,
                   to_container(FeatureGrid{high.geometry, high.channels, report.grad_high}));
  }
  if (grad_low_out) {
    save_container(*grad_low_out,
                   to_container(FeatureGrid{low.geometry, low.channels, report.grad_low}));
  }
  if (json) {
    ojson doc;
    doc["k"] = set.high_indices.size();
    doc["loss"] = rounded(report.value);
    doc["weighted_loss"] = rounded(cfg.gamma * report.value);
    out << doc.dump(2) << "\n";
  } else {
    out << row("k", std::to_string(set.high_indices.size())) << row("loss", format_number(report.value))
        << row("weighted loss", format_number(cfg.gamma * report.value));
  }
}

void run_eval(const RunConfig& cfg, const Path& pred_in, const Path& gt_in,
              const std::optional<Path>& calib_in, bool json, std::ostream& out) {
  const LabelGrid pred = load_label_input(pred_in, cfg);
  const LabelGrid gt = load_label_input(gt_in, cfg);
  if (!(pred.dims() == gt.dims())) {
    throw ShapeError("prediction " + pred.dims().to_string() + " and ground truth " +
                     gt.dims().to_string() + " differ in shape");
  }
  const std::size_t n = cfg.classes.count();
  const IouReport report = iou_miou(confusion(pred, gt, n), cfg.absent_class);

  std::vector<RangeEvaluation> ranges;
  if (!cfg.range_splits.empty()) {
    const CameraRig rig = calib_in ? load_calib(*calib_in, cfg) : default_rig(cfg);
    for (double r : cfg.range_splits) {
      const BoolGrid outside = complement(range_mask(gt.geometry, rig, r));
      ranges.push_back({r, iou_miou(confusion(pred, gt, n, &outside), cfg.absent_class)});
    }
  }
  out << (json ? iou_report_json(report, cfg.classes, ranges)
               : iou_report_table(report, cfg.classes, ranges));
}

void run_sparsity(const RunConfig& cfg, const Path& gt_in, const std::optional<Path>& csv_out,
                  bool json, std::ostream& out) {
  const LabelGrid gt = load_label_input(gt_in, cfg);
  const SparsityReport report = sparsity_stats(gt, cfg.classes.count());
  if (csv_out) {
    with_path(*csv_out,
              [&] { write_text_file(*csv_out, sparsity_histogram_csv(report, cfg.classes)); });
  }
  out << (json ? sparsity_report_json(report, cfg.classes)
               : sparsity_report_table(report, cfg.classes));
}

void run_lift(const RunConfig& cfg, const LiftInputs& in, bool json, std::ostream& out) {
  if (in.feature_maps.empty()) throw ConfigError("lift needs at least one feature map");
  if (in.calibs.size() != 1 && in.calibs.size() != in.feature_maps.size()) {
    throw ConfigError("give one calibration file, or one per feature map");
  }
  std::vector<FeatureMap2D> maps;
  std::vector<CameraRig> rigs;
  for (std::size_t i = 0; i < in.feature_maps.size(); ++i) {
    const Path& p = in.feature_maps[i];
    const GridContainer c = load_container(p);
    maps.push_back(with_path(p, [&] { return feature_map_from_container(c, cfg.feature_downscale); }));
    rigs.push_back(load_calib(in.calibs.size() == 1 ? in.calibs[0] : in.calibs[i], cfg));
  }
  const ResolutionPair pair = cfg.resolution_pair();
  const GridGeometry geom_high = GridGeometry::kitti_volume(pair.high);
  const GridGeometry geom_low = GridGeometry::kitti_volume(pair.low);

  auto seeded = [&](const GridGeometry& geom, const std::optional<Path>& proposals,
                    std::size_t& seed_count) {
    FeatureGrid dense = sample_features(maps, rigs, geom);
    if (!proposals) {
      seed_count = geom.dims.count();
      return dense;
    }
    const GridContainer c = load_container(*proposals);
    const ScoreGrid scores = with_path(*proposals, [&] { return scores_from_container(c, geom); });
    const SeedSet seeds = select_seeds(dense, scores, cfg.theta);
    seed_count = seeds.size();
    return scatter_seeds(seeds, geom);
  };
  std::size_t seeds_high = 0;
  std::size_t seeds_low = 0;
  const FeatureGrid high = seeded(geom_high, in.proposals_high, seeds_high);
  const FeatureGrid low = seeded(geom_low, in.proposals_low, seeds_low);
  const auto [fused_high, fused_low] = fuse_seeds(high, low, pair, cfg.fuse_mode);

  save_container(in.grid_out, to_container(fused_high));
  if (in.low_out) save_container(*in.low_out, to_container(fused_low));

  if (json) {
    ojson doc;
    doc["frames"] = maps.size();
    doc["channels"] = fused_high.channels;
    doc["seeds_high"] = seeds_high;
    doc["seeds_low"] = seeds_low;
    out << doc.dump(2) << "\n";
  } else {
    out << row("frames", std::to_string(maps.size()))
        << row("channels", std::to_string(fused_high.channels))
        << row("seeds high", std::to_string(seeds_high))
        << row("seeds low", std::to_string(seeds_low));
  }
}

void run_synth(const Path& spec_in, const Path& out_dir, bool json, std::ostream& out) {
  const SceneSpec spec =
      with_path(spec_in, [&] { return SceneSpec::from_json(read_text_file(spec_in)); });
  const Scene scene = generate_scene(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());

  save_container(out_dir / "labels.vxl", to_container(scene.labels));
  for (std::size_t i = 0; i < scene.rigs.size(); ++i) {
    const std::string n = std::to_string(i);
    save_container(out_dir / ("depth_" + n + ".vxl"), to_container(scene.depths[i]));
    const Path calib = out_dir / ("calib_" + n + ".txt");
    with_path(calib, [&] { write_text_file(calib, write_calibration(scene.rigs[i])); });
  }

  const std::size_t total = scene.labels.labels.size();
  const std::size_t occupied = static_cast<std::size_t>(
      std::count_if(scene.labels.labels.begin(), scene.labels.labels.end(),
                    [](Label l) { return l != ClassTable::kEmpty; }));
  const double empty_fraction = static_cast<double>(total - occupied) / static_cast<double>(total);
  if (json) {
    ojson doc;
    doc["dims"] = {spec.geometry.dims.x, spec.geometry.dims.y, spec.geometry.dims.z};
    doc["occupied"] = occupied;
    doc["empty_fraction"] = rounded(empty_fraction);
    doc["cameras"] = scene.rigs.size();
    out << doc.dump(2) << "\n";
  } else {
    out << row("dims", spec.geometry.dims.to_string()) << row("occupied", std::to_string(occupied))
        << row("empty fraction", format_number(empty_fraction))
        << row("cameras", std::to_string(scene.rigs.size()));
  }
}

}  // namespace voxalign::cli
