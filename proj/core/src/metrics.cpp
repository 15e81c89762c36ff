// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "voxalign/error.hpp"

namespace voxalign {
namespace {

double ratio(const ClassCounts& c) {
  const std::uint64_t denom = c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

std::string class_name(const ClassTable& table, std::size_t id) {
  return id < table.count() ? table.names[id] : "class" + std::to_string(id);
}

double rounded(double v) { return std::round(v * 1e6) / 1e6; }

std::string padded(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

ConfusionCounts confusion(const LabelGrid& pred, const LabelGrid& gt, std::size_t num_classes,
                          const BoolGrid* ignore) {
  pred.validate();
  gt.validate();
  if (!(pred.dims() == gt.dims())) {
    throw ShapeError("prediction " + pred.dims().to_string() + " and ground truth " +
                     gt.dims().to_string() + " differ in shape");
  }
  if (ignore != nullptr && ignore->values.size() != gt.labels.size()) {
    throw ShapeError("ignore mask does not match the evaluated grid");
  }
  ConfusionCounts out;
  out.per_class.resize(num_classes);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    if (gt.is_invalid(i) || pred.is_invalid(i)) continue;
    if (ignore != nullptr && ignore->at(i)) continue;
    const Label p = pred.labels[i];
    const Label g = gt.labels[i];
    if (p >= num_classes || g >= num_classes) {
      throw MappingError("label " + std::to_string(std::max(p, g)) + " at voxel " +
                         std::to_string(i) + " outside " + std::to_string(num_classes) +
                         " classes");
    }
    ++out.evaluated;
    if (p == g) {
      ++out.per_class[g].tp;
    } else {
      ++out.per_class[p].fp;
      ++out.per_class[g].fn;
    }
    const bool p_occ = p != ClassTable::kEmpty;
    const bool g_occ = g != ClassTable::kEmpty;
    if (p_occ && g_occ) ++out.occupancy.tp;
    else if (p_occ) ++out.occupancy.fp;
    else if (g_occ) ++out.occupancy.fn;
  }
  return out;
}

IouReport iou_miou(const ConfusionCounts& counts, AbsentClassPolicy policy) {
  IouReport r;
  r.iou = ratio(counts.occupancy);
  double sum = 0.0;
  std::size_t scored = 0;
  for (std::size_t c = 1; c < counts.per_class.size(); ++c) {
    const ClassCounts& cc = counts.per_class[c];
    const bool present = cc.tp + cc.fp + cc.fn > 0;
    const bool enters = present || policy == AbsentClassPolicy::Zero;
    r.class_iou.push_back(ratio(cc));
    r.class_scored.push_back(enters);
    if (enters) {
      sum += r.class_iou.back();
      ++scored;
    }
  }
  r.miou = scored == 0 ? 0.0 : sum / static_cast<double>(scored);
  return r;
}

BoolGrid range_mask(const GridGeometry& geom, const CameraRig& rig, double max_range) {
  geom.validate();
  if (!(max_range > 0.0)) throw DomainError("max_range must be positive");
  BoolGrid mask = BoolGrid::filled(geom.dims, false);
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    const Vec3 cam = rig.R() * voxel_centroid(coord_of(i, geom.dims), geom) + rig.t();
    mask.values[i] = (cam.z() > 0.0 && cam.z() <= max_range) ? 1 : 0;
  }
  return mask;
}

BoolGrid complement(const BoolGrid& mask) {
  BoolGrid out = mask;
  for (auto& v : out.values) v = v ? 0 : 1;
  return out;
}

SparsityReport sparsity_stats(const LabelGrid& gt, std::size_t num_classes) {
  gt.validate();
  SparsityReport r;
  r.counts.assign(num_classes, 0);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    if (gt.is_invalid(i)) continue;
    const Label l = gt.labels[i];
    if (l >= num_classes) {
      throw MappingError("label " + std::to_string(l) + " outside " +
                         std::to_string(num_classes) + " classes");
    }
    ++r.counts[l];
    ++r.valid_total;
  }
  if (r.valid_total == 0) throw DegenerateInputError("grid has no valid voxels");
  r.empty_fraction = static_cast<double>(r.counts[ClassTable::kEmpty]) /
                     static_cast<double>(r.valid_total);
  for (std::uint64_t c : r.counts) {
    r.log10_counts.push_back(std::log10(static_cast<double>(std::max<std::uint64_t>(c, 1))));
  }
  return r;
}

std::string iou_report_json(const IouReport& report, const ClassTable& table,
                            const std::vector<RangeEvaluation>& ranges) {
  nlohmann::ordered_json doc;
  doc["iou"] = rounded(report.iou);
  doc["miou"] = rounded(report.miou);
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < report.class_iou.size(); ++k) {
    classes.push_back({{"id", k + 1},
                       {"name", class_name(table, k + 1)},
                       {"iou", rounded(report.class_iou[k])},
                       {"scored", static_cast<bool>(report.class_scored[k])}});
  }
  doc["classes"] = classes;
  if (!ranges.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : ranges) {
      arr.push_back({{"max_range", rounded(r.max_range)},
                     {"iou", rounded(r.report.iou)},
                     {"miou", rounded(r.report.miou)}});
    }
    doc["ranges"] = arr;
  }
  return doc.dump(2) + "\n";
}

std::string iou_report_table(const IouReport& report, const ClassTable& table,
                             const std::vector<RangeEvaluation>& ranges) {
  std::ostringstream os;
  os << padded("class", 18) << "IoU\n";
  for (std::size_t k = 0; k < report.class_iou.size(); ++k) {
    os << padded(class_name(table, k + 1), 18) << format_number(report.class_iou[k])
       << (report.class_scored[k] ? "" : "  (skipped)") << "\n";
  }
  os << padded("IoU", 18) << format_number(report.iou) << "\n";
  os << padded("mIoU", 18) << format_number(report.miou) << "\n";
  for (const auto& r : ranges) {
    os << padded("range " + format_number(r.max_range), 18) << "IoU "
       << format_number(r.report.iou) << "  mIoU " << format_number(r.report.miou) << "\n";
  }
  return os.str();
}

std::string sparsity_report_json(const SparsityReport& report, const ClassTable& table) {
  nlohmann::ordered_json doc;
  doc["valid_voxels"] = report.valid_total;
  doc["empty_fraction"] = rounded(report.empty_fraction);
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < report.counts.size(); ++c) {
    classes.push_back({{"id", c},
                       {"name", class_name(table, c)},
                       {"count", report.counts[c]},
                       {"log10_count", rounded(report.log10_counts[c])}});
  }
  doc["classes"] = classes;
  return doc.dump(2) + "\n";
}

std::string sparsity_report_table(const SparsityReport& report, const ClassTable& table) {
  std::ostringstream os;
  os << padded("class", 18) << padded("count", 12) << "log10\n";
  for (std::size_t c = 0; c < report.counts.size(); ++c) {
    os << padded(class_name(table, c), 18) << padded(std::to_string(report.counts[c]), 12)
       << format_number(report.log10_counts[c]) << "\n";
  }
  os << padded("valid voxels", 18) << report.valid_total << "\n";
  os << padded("empty fraction", 18) << format_number(report.empty_fraction) << "\n";
  return os.str();
}

std::string sparsity_histogram_csv(const SparsityReport& report, const ClassTable& table) {
  std::ostringstream os;
  os << "class_id,class_name,count,log10_count\n";
  for (std::size_t c = 0; c < report.counts.size(); ++c) {
    os << c << "," << class_name(table, c) << "," << report.counts[c] << ","
       << format_number(report.log10_counts[c]) << "\n";
  }
  return os.str();
}

}  // namespace voxalign
