// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include <nlohmann/json.hpp>

#include "voxalign/error.hpp"

namespace voxalign::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + key + "'");
    }
  }
}

GridDims dims_of(const json& j, const std::string& key) {
  const auto v = j.get<std::vector<std::int32_t>>();
  if (v.size() != 3) throw ConfigError(key + " must list three extents");
  GridDims d{v[0], v[1], v[2]};
  d.validate();
  return d;
}

template <typename Enum>
Enum choice(const json& j, const std::string& key,
            std::initializer_list<std::pair<std::string_view, Enum>> options) {
  const auto s = j.get<std::string>();
  for (const auto& [name, value] : options) {
    if (s == name) return value;
  }
  std::string expected;
  for (const auto& [name, value] : options) expected += (expected.empty() ? "" : ", ") + std::string(name);
  throw ConfigError(key + " must be one of " + expected + " (got '" + s + "')");
}

}  // namespace

SemanticGroups RunConfig::semantic_groups() const {
  if (groups_json) return SemanticGroups::from_json(*groups_json, classes);
  return SemanticGroups::preset(groups, classes);
}

LabelMapping RunConfig::mapping() const {
  if (label_mapping) return LabelMapping::from_json(read_text_file(*label_mapping));
  return LabelMapping::semantic_kitti();
}

void RunConfig::validate() const {
  csa.validate();
  classes.validate();
  semantic_groups().validate(classes.count());
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (k == 0) throw ConfigError("k must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be finite and >= 0");
  (void)resolution_pair();
  for (double r : range_splits) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("range splits must be positive");
  }
  if (!(feature_downscale > 0.0)) throw ConfigError("feature_downscale must be positive");
  if (image_size.width <= 0 || image_size.height <= 0) {
    throw ConfigError("image_size must be positive");
  }
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig cfg;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  try {
    reject_unknown(doc,
                   {"csa", "classes", "label_mapping", "groups", "theta", "k", "gamma",
                    "resolution", "fuse_mode", "csa_resample", "pairing", "range_splits",
                    "absent_class", "feature_downscale", "image_size"},
                   "");
    if (doc.contains("csa")) {
      const json& c = doc["csa"];
      reject_unknown(c, {"w_e", "w_v", "alpha", "beta", "border"}, "csa.");
      cfg.csa.w_e = c.value("w_e", cfg.csa.w_e);
      cfg.csa.w_v = c.value("w_v", cfg.csa.w_v);
      cfg.csa.alpha = c.value("alpha", cfg.csa.alpha);
      cfg.csa.beta = c.value("beta", cfg.csa.beta);
      if (c.contains("border")) {
        cfg.csa.border = choice<BorderPolicy>(
            c["border"], "csa.border",
            {{"skip", BorderPolicy::Skip}, {"pad_empty", BorderPolicy::PadEmpty}});
      }
    }
    if (doc.contains("classes")) {
      const json& c = doc["classes"];
      if (c.is_string()) {
        const auto name = c.get<std::string>();
        if (name == "semantic_kitti") {
          cfg.classes = ClassTable::semantic_kitti();
        } else if (name == "kitti360") {
          cfg.classes = ClassTable::kitti360();
        } else {
          throw ConfigError("classes must be semantic_kitti, kitti360 or a name list");
        }
      } else {
        cfg.classes.names = c.get<std::vector<std::string>>();
      }
    }
    if (doc.contains("label_mapping")) cfg.label_mapping = doc["label_mapping"].get<std::string>();
    if (doc.contains("groups")) {
      const json& g = doc["groups"];
      if (g.is_string()) {
        cfg.groups = g.get<std::string>();
      } else {
        cfg.groups = "custom";
        cfg.groups_json = g.dump();
      }
    }
    cfg.theta = doc.value("theta", cfg.theta);
    if (doc.contains("k")) {
      const auto k = doc["k"].get<std::int64_t>();
      if (k <= 0) throw ConfigError("k must be positive");
      cfg.k = static_cast<std::size_t>(k);
    }
    cfg.gamma = doc.value("gamma", cfg.gamma);
    if (doc.contains("resolution")) {
      const json& r = doc["resolution"];
      reject_unknown(r, {"high", "low"}, "resolution.");
      if (r.contains("high")) cfg.high = dims_of(r["high"], "resolution.high");
      if (r.contains("low")) cfg.low = dims_of(r["low"], "resolution.low");
    }
    if (doc.contains("fuse_mode")) {
      cfg.fuse_mode = choice<FuseMode>(
          doc["fuse_mode"], "fuse_mode",
          {{"sequential", FuseMode::Sequential}, {"simultaneous", FuseMode::Simultaneous}});
    }
    if (doc.contains("csa_resample")) {
      cfg.csa_resample = choice<CsaResample>(doc["csa_resample"], "csa_resample",
                                             {{"max", CsaResample::Max}, {"mean", CsaResample::Mean}});
    }
    if (doc.contains("pairing")) {
      cfg.pairing = choice<Pairing>(
          doc["pairing"], "pairing",
          {{"correspondence", Pairing::Correspondence}, {"independent", Pairing::Independent}});
    }
    if (doc.contains("range_splits")) cfg.range_splits = doc["range_splits"].get<std::vector<double>>();
    if (doc.contains("absent_class")) {
      cfg.absent_class = choice<AbsentClassPolicy>(
          doc["absent_class"], "absent_class",
          {{"zero", AbsentClassPolicy::Zero}, {"skip", AbsentClassPolicy::Skip}});
    }
    cfg.feature_downscale = doc.value("feature_downscale", cfg.feature_downscale);
    if (doc.contains("image_size")) {
      const auto v = doc["image_size"].get<std::vector<int>>();
      if (v.size() != 2) throw ConfigError("image_size must be [width, height]");
      cfg.image_size = {v[0], v[1]};
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path) {
  if (!path) {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  return parse_run_config(read_text_file(*path));
}

}  // namespace voxalign::cli
