// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/csa.hpp"

#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "voxalign/error.hpp"
#include "voxalign/numeric.hpp"
#include "voxalign/parallel.hpp"

namespace voxalign {
namespace {

using GroupSpec = std::vector<std::pair<std::string, std::vector<std::string>>>;

// KITTI-360 adds two catch-all classes; they join the closest static group.
const GroupSpec& refined_groups() {
  static const GroupSpec spec = {
      {"vehicle", {"car", "bicycle", "motorcycle", "truck", "other-vehicle"}},
      {"human", {"person", "bicyclist", "motorcyclist"}},
      {"ground", {"road", "parking", "sidewalk", "other-ground", "terrain"}},
      {"building", {"building", "other-structure"}},
      {"infrastructure", {"fence", "pole", "traffic-sign", "other-object"}},
      {"plant", {"vegetation", "trunk"}},
  };
  return spec;
}

const GroupSpec& coarse_groups() {
  static const GroupSpec spec = {
      {"foreground",
       {"car", "bicycle", "motorcycle", "truck", "other-vehicle", "person", "bicyclist",
        "motorcyclist"}},
      {"background",
       {"road", "parking", "sidewalk", "other-ground", "terrain", "building",
        "other-structure", "fence", "pole", "traffic-sign", "other-object", "vegetation",
        "trunk"}},
  };
  return spec;
}

SemanticGroups from_named_groups(std::string name, const GroupSpec& spec,
                                 const ClassTable& table) {
  SemanticGroups g;
  g.name = std::move(name);
  g.group_names.push_back("empty");
  constexpr Label kUnset = 0xFFFF;
  g.mapping.assign(table.count(), kUnset);
  g.mapping[ClassTable::kEmpty] = 0;
  for (std::size_t gi = 0; gi < spec.size(); ++gi) {
    g.group_names.push_back(spec[gi].first);
    for (const auto& cls : spec[gi].second) {
      if (auto id = table.find(cls)) g.mapping[*id] = static_cast<Label>(gi + 1);
    }
  }
  for (std::size_t c = 0; c < g.mapping.size(); ++c) {
    if (g.mapping[c] == kUnset) {
      throw MappingError("class '" + table.names[c] + "' is not covered by grouping " +
                         g.name);
    }
  }
  return g;
}

}  // namespace

SemanticGroups SemanticGroups::preset(GroupPreset which, const ClassTable& table) {
  table.validate();
  switch (which) {
    case GroupPreset::C0: {
      SemanticGroups g{"C0", std::vector<Label>(table.count(), 1), {"empty", "occupied"}};
      g.mapping[ClassTable::kEmpty] = 0;
      return g;
    }
    case GroupPreset::C1:
      return from_named_groups("C1", coarse_groups(), table);
    case GroupPreset::C2:
      return from_named_groups("C2", refined_groups(), table);
    case GroupPreset::C3: {
      SemanticGroups g{"C3", {}, table.names};
      for (std::size_t c = 0; c < table.count(); ++c) g.mapping.push_back(static_cast<Label>(c));
      return g;
    }
  }
  throw ConfigError("unknown group preset");
}

SemanticGroups SemanticGroups::preset(std::string_view name, const ClassTable& table) {
  if (name == "C0") return preset(GroupPreset::C0, table);
  if (name == "C1") return preset(GroupPreset::C1, table);
  if (name == "C2") return preset(GroupPreset::C2, table);
  if (name == "C3") return preset(GroupPreset::C3, table);
  throw ConfigError("unknown semantic group preset '" + std::string(name) +
                    "' (expected C0, C1, C2 or C3)");
}

SemanticGroups SemanticGroups::from_json(std::string_view text, const ClassTable& table) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("group file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("group file must hold a JSON object");
  const std::string name = doc.value("name", std::string("custom"));
  SemanticGroups g;
  try {
    if (doc.contains("mapping")) {
      g.name = name;
      g.mapping = doc.at("mapping").get<std::vector<Label>>();
      Label max_group = 0;
      for (Label m : g.mapping) max_group = std::max(max_group, m);
      for (Label i = 0; i <= max_group; ++i) g.group_names.push_back("group" + std::to_string(i));
    } else if (doc.contains("groups")) {
      GroupSpec spec;
      for (const auto& entry : doc.at("groups")) {
        spec.emplace_back(entry.at("name").get<std::string>(),
                          entry.at("classes").get<std::vector<std::string>>());
      }
      g = from_named_groups(name, spec, table);
    } else {
      throw ParseError("group file needs a 'mapping' or 'groups' entry");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("group file: ") + e.what());
  }
  g.validate(table.count());
  return g;
}

void SemanticGroups::validate(std::size_t class_count) const {
  if (mapping.size() != class_count) {
    throw MappingError("grouping covers " + std::to_string(mapping.size()) +
                       " classes, table has " + std::to_string(class_count));
  }
  if (mapping.empty() || mapping[ClassTable::kEmpty] != 0) {
    throw MappingError("empty class must map to group 0");
  }
  std::set<Label> used(mapping.begin(), mapping.end());
  Label expect = 0;
  for (Label g : used) {
    if (g != expect++) throw MappingError("group ids must be contiguous from 0");
  }
}

void CsaParams::validate() const {
  if (!(w_e >= 0.0) || !(w_v >= 0.0)) throw ValidationError("CSA weights must be >= 0");
  if (!(alpha > 0.0)) throw ValidationError("CSA alpha must be > 0");
  if (!std::isfinite(beta)) throw ValidationError("CSA beta must be finite");
}

void AnisotropyMap::validate() const {
  geometry.validate();
  const std::size_t n = geometry.dims.count();
  if (s_surface.size() != n || s_edge.size() != n || s_vertex.size() != n ||
      s_csa.size() != n) {
    throw ShapeError("anisotropy map arrays do not match " + geometry.dims.to_string());
  }
}

LabelGrid reassign(const LabelGrid& labels, const SemanticGroups& groups) {
  labels.validate();
  LabelGrid out = labels;
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    const Label l = labels.labels[i];
    if (l >= groups.mapping.size()) {
      throw MappingError("class id " + std::to_string(l) + " has no group in " + groups.name);
    }
    out.labels[i] = groups.mapping[l];
  }
  return out;
}

AnisotropyMap cubic_anisotropy(const LabelGrid& v_re, const CsaParams& params) {
  v_re.validate();
  params.validate();
  const GridDims d = v_re.dims();
  const std::size_t n = d.count();
  AnisotropyMap map{v_re.geometry, std::vector<std::uint8_t>(n, 0),
                    std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0),
                    std::vector<double>(n, 0.0)};
  const auto& hood = neighborhood26();
  const bool pad_empty = params.border == BorderPolicy::PadEmpty;

  parallel_for(0, static_cast<std::size_t>(d.x), [&](std::size_t lo, std::size_t hi) {
    for (auto x = static_cast<std::int32_t>(lo); x < static_cast<std::int32_t>(hi); ++x)
      for (std::int32_t y = 0; y < d.y; ++y)
        for (std::int32_t z = 0; z < d.z; ++z) {
          const std::size_t i = linear_index({x, y, z}, d);
          const Label self = v_re.labels[i];
          int counts[3] = {0, 0, 0};
          for (const NeighborOffset& nb : hood) {
            const Coord q{x + nb.offset.x, y + nb.offset.y, z + nb.offset.z};
            bool differs;
            if (in_bounds(q, d)) {
              differs = v_re.labels[linear_index(q, d)] != self;
            } else if (pad_empty) {
              differs = self != ClassTable::kEmpty;
            } else {
              continue;
            }
            if (differs) ++counts[static_cast<int>(nb.adjacency)];
          }
          map.s_surface[i] = static_cast<std::uint8_t>(counts[0]);
          map.s_edge[i] = static_cast<std::uint8_t>(counts[1]);
          map.s_vertex[i] = static_cast<std::uint8_t>(counts[2]);
          map.s_csa[i] = params.weight(counts[0], counts[1], counts[2]);
        }
  });
  return map;
}

LossReport csa_cross_entropy(const FeatureGrid& scores, const LabelGrid& labels,
                             const AnisotropyMap& csa, const BoolGrid* mask) {
  scores.validate();
  labels.validate();
  csa.validate();
  const GridDims d = scores.geometry.dims;
  if (!(labels.dims() == d) || !(csa.geometry.dims == d)) {
    throw ShapeError("scores, labels and anisotropy map must share grid dims");
  }
  if (mask != nullptr && !(mask->dims == d && mask->values.size() == d.count())) {
    throw ShapeError("loss mask does not match grid dims");
  }
  const int C = scores.channels;

  std::vector<std::size_t> voxels;
  for (std::size_t i = 0; i < d.count(); ++i) {
    if (mask != nullptr && !mask->at(i)) continue;
    if (labels.is_invalid(i)) continue;
    if (labels.labels[i] >= static_cast<Label>(C)) {
      throw MappingError("label " + std::to_string(labels.labels[i]) +
                         " has no score channel (" + std::to_string(C) + " channels)");
    }
    voxels.push_back(i);
  }
  if (voxels.empty()) throw DegenerateInputError("loss mask selects no voxels");

  const double inv_n = 1.0 / static_cast<double>(voxels.size());
  LossReport report;
  report.gradient.assign(scores.values.size(), 0.0);
  std::vector<double> terms(voxels.size());
  std::vector<double> prob(C);
  for (std::size_t k = 0; k < voxels.size(); ++k) {
    const std::size_t i = voxels[k];
    const auto z = scores.row(i);
    const Label y = labels.labels[i];
    const double w = csa.s_csa[i];
    terms[k] = w * (log_sum_exp(z) - z[y]);
    softmax(z, prob);
    double* g = report.gradient.data() + i * C;
    for (int c = 0; c < C; ++c) g[c] = w * inv_n * (prob[c] - (c == y ? 1.0 : 0.0));
  }
  report.value = pairwise_sum(terms) * inv_n;
  return report;
}

}  // namespace voxalign
