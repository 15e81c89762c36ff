// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_CSA_HPP
#define VOXALIGN_CSA_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "voxalign/grid.hpp"
#include "voxalign/lift.hpp"

namespace voxalign {

enum class GroupPreset {
  C0,  // empty / occupied
  C1,  // empty / foreground / background
  C2,  // empty / vehicle / human / ground / building / infrastructure / plant
  C3,  // every class its own group
};

// Class id -> group id. Empty always maps to group 0 and group ids are
// contiguous from 0.
struct SemanticGroups {
  std::string name;
  std::vector<Label> mapping;
  std::vector<std::string> group_names;

  static SemanticGroups preset(GroupPreset which, const ClassTable& table);
  static SemanticGroups preset(std::string_view name, const ClassTable& table);
  // {"name": ..., "mapping": [group per class id]} or
  // {"name": ..., "groups": [{"name": ..., "classes": [class names]}]}.
  static SemanticGroups from_json(std::string_view text, const ClassTable& table);

  std::size_t group_count() const { return group_names.size(); }
  void validate(std::size_t class_count) const;
};

enum class BorderPolicy {
  Skip,      // out-of-grid neighbors are not counted
  PadEmpty,  // out-of-grid neighbors count as group 0
};

struct CsaParams {
  double w_e = 0.1;
  double w_v = 0.3;
  double alpha = 1.0;
  double beta = 0.5;
  BorderPolicy border = BorderPolicy::Skip;

  void validate() const;
  double weight(int surface, int edge, int vertex) const {
    return alpha * (surface + w_e * edge + w_v * vertex) + beta;
  }
};

struct AnisotropyMap {
  GridGeometry geometry;
  std::vector<std::uint8_t> s_surface;  // 0..6
  std::vector<std::uint8_t> s_edge;     // 0..12
  std::vector<std::uint8_t> s_vertex;   // 0..8
  std::vector<double> s_csa;

  void validate() const;
};

struct LossReport {
  double value = 0.0;
  std::vector<double> gradient;
};

LabelGrid reassign(const LabelGrid& labels, const SemanticGroups& groups);

// Counts, per voxel, the 26-neighbors carrying a different group id, split by
// adjacency class, and maps them to the scalar weight
// alpha * (surface + w_e * edge + w_v * vertex) + beta.
AnisotropyMap cubic_anisotropy(const LabelGrid& v_re, const CsaParams& params);

// Anisotropy-weighted softmax cross-entropy averaged over the evaluated
// voxels (mask true and label valid). The gradient is with respect to the raw
// scores and has the scores' layout.
LossReport csa_cross_entropy(const FeatureGrid& scores, const LabelGrid& labels,
                             const AnisotropyMap& csa, const BoolGrid* mask = nullptr);

}  // namespace voxalign

#endif  // VOXALIGN_CSA_HPP
