// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/lift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "voxalign/error.hpp"
#include "voxalign/parallel.hpp"

namespace voxalign {

FeatureMap2D FeatureMap2D::filled(int width, int height, int channels, double value,
                                  double downscale) {
  FeatureMap2D map{width, height, channels, downscale, {}};
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw ShapeError("feature map extents must be positive");
  }
  map.values.assign(static_cast<std::size_t>(width) * height * channels, value);
  return map;
}

void FeatureMap2D::validate() const {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw ShapeError("feature map extents must be positive");
  }
  if (!(downscale >= 1.0)) throw ShapeError("feature map downscale must be >= 1");
  if (values.size() != static_cast<std::size_t>(width) * height * channels) {
    throw ShapeError("feature map value count does not match its extents");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("feature map holds non-finite values");
  }
}

void bilinear_sample(const FeatureMap2D& map, double x, double y, std::span<double> out) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const double wx = x - fx;
  const double wy = y - fy;
  auto clamp_col = [&](double c) { return std::clamp(static_cast<int>(c), 0, map.width - 1); };
  auto clamp_row = [&](double r) { return std::clamp(static_cast<int>(r), 0, map.height - 1); };
  const int c0 = clamp_col(fx);
  const int c1 = clamp_col(fx + 1.0);
  const int r0 = clamp_row(fy);
  const int r1 = clamp_row(fy + 1.0);
  for (int c = 0; c < map.channels; ++c) {
    const double top = std::lerp(map.at(c0, r0, c), map.at(c1, r0, c), wx);
    const double bottom = std::lerp(map.at(c0, r1, c), map.at(c1, r1, c), wx);
    out[c] = std::lerp(top, bottom, wy);
  }
}

FeatureGrid FeatureGrid::zeros(const GridGeometry& geometry, int channels) {
  geometry.validate();
  if (channels <= 0) throw ShapeError("feature grid needs at least one channel");
  return FeatureGrid{geometry, channels,
                     std::vector<double>(geometry.dims.count() * channels, 0.0)};
}

void FeatureGrid::validate() const {
  geometry.validate();
  if (channels <= 0) throw ShapeError("feature grid needs at least one channel");
  if (values.size() != geometry.dims.count() * static_cast<std::size_t>(channels)) {
    throw ShapeError("feature grid value count does not match " +
                     geometry.dims.to_string() + " x " + std::to_string(channels));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("feature grid holds non-finite values");
  }
}

void ScoreGrid::validate() const {
  geometry.validate();
  if (scores.size() != geometry.dims.count()) {
    throw ShapeError("score grid size does not match " + geometry.dims.to_string());
  }
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw DomainError("scores must lie in [0, 1]");
  }
}

FeatureGrid sample_features(std::span<const FeatureMap2D> maps,
                            std::span<const CameraRig> rigs, const GridGeometry& geom) {
  if (maps.empty()) throw ShapeError("sample_features needs at least one frame");
  if (maps.size() != rigs.size()) {
    throw ShapeError("got " + std::to_string(maps.size()) + " feature maps but " +
                     std::to_string(rigs.size()) + " camera rigs");
  }
  const int channels = maps.front().channels;
  for (const auto& m : maps) {
    m.validate();
    if (m.channels != channels) throw ShapeError("feature maps disagree on channel count");
  }

  FeatureGrid out = FeatureGrid::zeros(geom, channels);
  const GridDims d = geom.dims;
  parallel_for(0, static_cast<std::size_t>(d.x), [&](std::size_t lo, std::size_t hi) {
    std::vector<double> sample(channels);
    for (auto x = static_cast<std::int32_t>(lo); x < static_cast<std::int32_t>(hi); ++x)
      for (std::int32_t y = 0; y < d.y; ++y)
        for (std::int32_t z = 0; z < d.z; ++z) {
          const Coord c{x, y, z};
          const Vec3 centroid = voxel_centroid(c, geom);
          auto acc = out.row(linear_index(c, d));
          int seen = 0;
          for (std::size_t t = 0; t < maps.size(); ++t) {
            const CameraRig& rig = rigs[t];
            if (std::abs((rig.R() * centroid + rig.t()).z()) < 1e-12) continue;
            const Projection pr = project_point(centroid, rig);
            if (!in_fov(pr.u, pr.v, pr.depth, rig)) continue;
            const double ds = maps[t].downscale;
            bilinear_sample(maps[t], pr.u / ds - 0.5, pr.v / ds - 0.5, sample);
            for (int ch = 0; ch < channels; ++ch) acc[ch] += sample[ch];
            ++seen;
          }
          if (seen > 0) {
            const double weight = 1.0 / seen;
            for (double& v : acc) v *= weight;
          }
        }
  });
  return out;
}

SeedSet select_seeds(const FeatureGrid& feat, const ScoreGrid& proposals, double theta) {
  feat.validate();
  proposals.validate();
  if (!(feat.geometry.dims == proposals.geometry.dims)) {
    throw ShapeError("proposal grid " + proposals.geometry.dims.to_string() +
                     " does not match feature grid " + feat.geometry.dims.to_string());
  }
  SeedSet seeds;
  seeds.channels = feat.channels;
  for (std::size_t i = 0; i < proposals.scores.size(); ++i) {
    if (proposals.scores[i] > theta) {
      seeds.indices.push_back(i);
      const auto r = feat.row(i);
      seeds.features.insert(seeds.features.end(), r.begin(), r.end());
    }
  }
  return seeds;
}

FeatureGrid scatter_seeds(const SeedSet& seeds, const GridGeometry& geometry) {
  FeatureGrid out = FeatureGrid::zeros(geometry, seeds.channels);
  if (seeds.features.size() != seeds.indices.size() * seeds.channels) {
    throw ShapeError("seed feature rows do not match seed count");
  }
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const std::size_t i = seeds.indices[s];
    if (i >= geometry.dims.count()) throw BoundsError("seed index outside grid");
    std::copy_n(seeds.features.begin() + static_cast<std::ptrdiff_t>(s * seeds.channels),
                seeds.channels, out.row(i).begin());
  }
  return out;
}

namespace {

struct AxisTap {
  std::int32_t lo;
  std::int32_t hi;
  double weight;
};

std::vector<AxisTap> axis_taps(std::int32_t in_extent, std::int32_t factor) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(in_extent) * factor);
  for (std::size_t o = 0; o < taps.size(); ++o) {
    const double src = std::clamp((static_cast<double>(o) + 0.5) / factor - 0.5, 0.0,
                                  static_cast<double>(in_extent - 1));
    const auto lo = static_cast<std::int32_t>(std::floor(src));
    const std::int32_t hi = std::min(lo + 1, in_extent - 1);
    taps[o] = AxisTap{lo, hi, src - lo};
  }
  return taps;
}

}  // namespace

FeatureGrid upsample_trilinear(const FeatureGrid& feat, std::int32_t factor) {
  feat.validate();
  if (factor <= 0) throw ShapeError("upsample factor must be positive");
  const GridDims in = feat.geometry.dims;
  FeatureGrid out = FeatureGrid::zeros(feat.geometry.refined(factor), feat.channels);
  const GridDims od = out.geometry.dims;
  const auto tx = axis_taps(in.x, factor);
  const auto ty = axis_taps(in.y, factor);
  const auto tz = axis_taps(in.z, factor);
  const int C = feat.channels;

  parallel_for(0, static_cast<std::size_t>(od.x), [&](std::size_t lo, std::size_t hi) {
    for (auto x = static_cast<std::int32_t>(lo); x < static_cast<std::int32_t>(hi); ++x)
      for (std::int32_t y = 0; y < od.y; ++y)
        for (std::int32_t z = 0; z < od.z; ++z) {
          const AxisTap& ax = tx[x];
          const AxisTap& ay = ty[y];
          const AxisTap& az = tz[z];
          auto at = [&](std::int32_t i, std::int32_t j, std::int32_t k, int c) {
            return feat.values[linear_index({i, j, k}, in) * C + c];
          };
          auto dst = out.row(linear_index({x, y, z}, od));
          for (int c = 0; c < C; ++c) {
            const double c00 = std::lerp(at(ax.lo, ay.lo, az.lo, c), at(ax.hi, ay.lo, az.lo, c), ax.weight);
            const double c01 = std::lerp(at(ax.lo, ay.lo, az.hi, c), at(ax.hi, ay.lo, az.hi, c), ax.weight);
            const double c10 = std::lerp(at(ax.lo, ay.hi, az.lo, c), at(ax.hi, ay.hi, az.lo, c), ax.weight);
            const double c11 = std::lerp(at(ax.lo, ay.hi, az.hi, c), at(ax.hi, ay.hi, az.hi, c), ax.weight);
            const double c0 = std::lerp(c00, c10, ay.weight);
            const double c1 = std::lerp(c01, c11, ay.weight);
            dst[c] = std::lerp(c0, c1, az.weight);
          }
        }
  });
  return out;
}

FeatureGrid downsample_avgpool(const FeatureGrid& feat, std::int32_t factor) {
  feat.validate();
  if (factor <= 0) throw ShapeError("pooling factor must be positive");
  const GridDims in = feat.geometry.dims;
  FeatureGrid out = FeatureGrid::zeros(feat.geometry.coarsened(factor), feat.channels);
  const GridDims od = out.geometry.dims;
  const int C = feat.channels;
  const double inv = 1.0 / (static_cast<double>(factor) * factor * factor);

  parallel_for(0, static_cast<std::size_t>(od.x), [&](std::size_t lo, std::size_t hi) {
    for (auto x = static_cast<std::int32_t>(lo); x < static_cast<std::int32_t>(hi); ++x)
      for (std::int32_t y = 0; y < od.y; ++y)
        for (std::int32_t z = 0; z < od.z; ++z) {
          auto dst = out.row(linear_index({x, y, z}, od));
          for (std::int32_t dx = 0; dx < factor; ++dx)
            for (std::int32_t dy = 0; dy < factor; ++dy)
              for (std::int32_t dz = 0; dz < factor; ++dz) {
                const auto src = feat.row(linear_index(
                    {x * factor + dx, y * factor + dy, z * factor + dz}, in));
                for (int c = 0; c < C; ++c) dst[c] += src[c];
              }
          for (double& v : dst) v *= inv;
        }
  });
  return out;
}

namespace {

void add_into(FeatureGrid& dst, const FeatureGrid& src) {
  for (std::size_t i = 0; i < dst.values.size(); ++i) dst.values[i] += src.values[i];
}

}  // namespace

std::pair<FeatureGrid, FeatureGrid> fuse_seeds(const FeatureGrid& high,
                                               const FeatureGrid& low,
                                               const ResolutionPair& pair, FuseMode mode) {
  pair.validate();
  high.validate();
  low.validate();
  if (!(high.geometry.dims == pair.high) || !(low.geometry.dims == pair.low)) {
    throw ShapeError("fuse_seeds grids " + high.geometry.dims.to_string() + " / " +
                     low.geometry.dims.to_string() + " do not match resolution pair " +
                     pair.high.to_string() + " / " + pair.low.to_string());
  }
  if (high.channels != low.channels) throw ShapeError("fuse_seeds channel mismatch");

  FeatureGrid new_high = high;
  add_into(new_high, upsample_trilinear(low, pair.lambda));
  FeatureGrid new_low = low;
  const FeatureGrid& pooled_source = mode == FuseMode::Sequential ? new_high : high;
  add_into(new_low, downsample_avgpool(pooled_source, pair.lambda));
  return {std::move(new_high), std::move(new_low)};
}

}  // namespace voxalign
