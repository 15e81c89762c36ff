// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_METRICS_HPP
#define VOXALIGN_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxalign/camera.hpp"
#include "voxalign/grid.hpp"

namespace voxalign {

struct ClassCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  bool operator==(const ClassCounts&) const = default;
};

struct ConfusionCounts {
  std::vector<ClassCounts> per_class;  // indexed by class id, empty included
  ClassCounts occupancy;               // any non-empty class counts as occupied
  std::uint64_t evaluated = 0;

  std::size_t class_count() const { return per_class.size(); }
};

// Tallies every voxel that is valid in both grids and not set in `ignore`.
ConfusionCounts confusion(const LabelGrid& pred, const LabelGrid& gt, std::size_t num_classes,
                          const BoolGrid* ignore = nullptr);

enum class AbsentClassPolicy {
  Zero,  // tp + fp + fn == 0 scores 0 and still enters the mean
  Skip,  // such classes are left out of the mean
};

struct IouReport {
  double iou = 0.0;
  std::vector<double> class_iou;  // non-empty classes, class c at [c - 1]
  std::vector<bool> class_scored;
  double miou = 0.0;
};

IouReport iou_miou(const ConfusionCounts& counts,
                   AbsentClassPolicy policy = AbsentClassPolicy::Zero);

// Voxels whose centroid lies in front of the camera at forward (camera z)
// distance <= max_range.
BoolGrid range_mask(const GridGeometry& geom, const CameraRig& rig, double max_range);

// Voxels where mask is false.
BoolGrid complement(const BoolGrid& mask);

struct SparsityReport {
  std::vector<std::uint64_t> counts;  // per class id, valid voxels only
  std::uint64_t valid_total = 0;
  double empty_fraction = 0.0;
  std::vector<double> log10_counts;  // log10(max(count, 1))
};

SparsityReport sparsity_stats(const LabelGrid& gt, std::size_t num_classes);

struct RangeEvaluation {
  double max_range = 0.0;
  IouReport report;
};

std::string iou_report_json(const IouReport& report, const ClassTable& table,
                            const std::vector<RangeEvaluation>& ranges = {});
std::string iou_report_table(const IouReport& report, const ClassTable& table,
                             const std::vector<RangeEvaluation>& ranges = {});
std::string sparsity_report_json(const SparsityReport& report, const ClassTable& table);
std::string sparsity_report_table(const SparsityReport& report, const ClassTable& table);
std::string sparsity_histogram_csv(const SparsityReport& report, const ClassTable& table);

// "%.6f"
std::string format_number(double value);

}  // namespace voxalign

#endif  // VOXALIGN_METRICS_HPP
