// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/cda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "voxalign/error.hpp"
#include "voxalign/numeric.hpp"

namespace voxalign {

ScoreGrid occupancy_confidence(const FeatureGrid& scores) {
  scores.validate();
  if (scores.channels < 2) throw ShapeError("occupancy confidence needs >= 2 channels");
  ScoreGrid conf{scores.geometry, std::vector<double>(scores.geometry.dims.count())};
  std::vector<double> prob(scores.channels);
  for (std::size_t i = 0; i < conf.scores.size(); ++i) {
    softmax(scores.row(i), prob);
    conf.scores[i] = *std::max_element(prob.begin(), prob.end());
  }
  return conf;
}

RealGrid csa_to_resolution(const AnisotropyMap& csa, GridDims target, CsaResample mode) {
  csa.validate();
  target.validate();
  const GridDims src = csa.geometry.dims;
  if (src.x % target.x || src.y % target.y || src.z % target.z) {
    throw ShapeError("anisotropy grid " + src.to_string() + " is not a multiple of " +
                     target.to_string());
  }
  const std::int32_t fx = src.x / target.x;
  const std::int32_t fy = src.y / target.y;
  const std::int32_t fz = src.z / target.z;
  const double inv = 1.0 / (static_cast<double>(fx) * fy * fz);

  RealGrid out{target, std::vector<double>(target.count())};
  for (std::int32_t x = 0; x < target.x; ++x)
    for (std::int32_t y = 0; y < target.y; ++y)
      for (std::int32_t z = 0; z < target.z; ++z) {
        double acc = mode == CsaResample::Max ? -std::numeric_limits<double>::infinity() : 0.0;
        for (std::int32_t dx = 0; dx < fx; ++dx)
          for (std::int32_t dy = 0; dy < fy; ++dy)
            for (std::int32_t dz = 0; dz < fz; ++dz) {
              const double v =
                  csa.s_csa[linear_index({x * fx + dx, y * fy + dy, z * fz + dz}, src)];
              acc = mode == CsaResample::Max ? std::max(acc, v) : acc + v;
            }
        out.values[linear_index({x, y, z}, target)] = mode == CsaResample::Max ? acc : acc * inv;
      }
  return out;
}

CriticalSet select_critical(const ScoreGrid& conf, const RealGrid& csa_at_res, std::size_t k) {
  conf.validate();
  if (!(conf.geometry.dims == csa_at_res.dims) ||
      csa_at_res.values.size() != conf.scores.size()) {
    throw ShapeError("confidence grid " + conf.geometry.dims.to_string() +
                     " does not match anisotropy grid " + csa_at_res.dims.to_string());
  }
  const std::size_t n = conf.scores.size();
  if (k == 0) throw ShapeError("critical voxel count k must be positive");
  if (k > n) {
    throw ShapeError("k = " + std::to_string(k) + " exceeds voxel count " + std::to_string(n));
  }

  std::vector<double> product(n);
  for (std::size_t i = 0; i < n; ++i) {
    product[i] = conf.scores[i] * csa_at_res.values[i];
    if (!std::isfinite(product[i])) throw DomainError("non-finite ranking score");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto ranks_before = [&](std::size_t a, std::size_t b) {
    if (product[a] != product[b]) return product[a] > product[b];
    return a < b;
  };
  const auto kth = order.begin() + static_cast<std::ptrdiff_t>(k);
  std::nth_element(order.begin(), kth - 1, order.end(), ranks_before);
  std::sort(order.begin(), kth, ranks_before);

  CriticalSet set;
  set.resolution = conf.geometry.dims;
  set.indices.assign(order.begin(), kth);
  set.ranking_score.reserve(k);
  for (std::size_t i : set.indices) set.ranking_score.push_back(product[i]);
  return set;
}

std::vector<std::size_t> pair_across_resolutions(std::span<const std::size_t> high_indices,
                                                 const ResolutionPair& pair) {
  pair.validate();
  std::vector<std::size_t> low;
  low.reserve(high_indices.size());
  for (std::size_t i : high_indices) {
    const Coord c = coord_of(i, pair.high);
    low.push_back(linear_index({c.x / pair.lambda, c.y / pair.lambda, c.z / pair.lambda},
                               pair.low));
  }
  return low;
}

Matrix voxel_distributions(const FeatureGrid& scores, std::span<const std::size_t> indices) {
  scores.validate();
  Matrix out = Matrix::zeros(indices.size(), static_cast<std::size_t>(scores.channels));
  const std::size_t n = scores.geometry.dims.count();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= n) throw BoundsError("distribution index outside grid");
    softmax(scores.row(indices[r]), out.row(r));
  }
  return out;
}

std::vector<double> distributions_backward(const FeatureGrid& scores,
                                           std::span<const std::size_t> indices,
                                           const Matrix& distributions,
                                           const Matrix& grad_distributions) {
  const auto C = static_cast<std::size_t>(scores.channels);
  if (distributions.rows != indices.size() || grad_distributions.rows != indices.size() ||
      distributions.cols != C || grad_distributions.cols != C) {
    throw ShapeError("distribution gradient does not match the selected voxels");
  }
  std::vector<double> grad(scores.values.size(), 0.0);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto p = distributions.row(r);
    const auto g = grad_distributions.row(r);
    double dot = 0.0;
    for (std::size_t c = 0; c < C; ++c) dot += p[c] * g[c];
    double* dst = grad.data() + indices[r] * C;
    for (std::size_t c = 0; c < C; ++c) dst[c] += p[c] * (g[c] - dot);
  }
  return grad;
}

PairLossReport circulated_loss(const Matrix& p1, const Matrix& p2) {
  if (p1.rows != p2.rows || p1.cols != p2.cols || p1.values.size() != p2.values.size() ||
      p1.values.size() != p1.rows * p1.cols) {
    throw ShapeError("circulated loss needs equally shaped probability matrices");
  }
  if (p1.rows == 0) throw DegenerateInputError("circulated loss over zero rows");
  for (std::size_t i = 0; i < p1.values.size(); ++i) {
    if (!(p1.values[i] >= 0.0) || !(p2.values[i] >= 0.0)) {
      throw DomainError("probabilities must be non-negative and finite");
    }
  }

  const double inv_k = 1.0 / static_cast<double>(p1.rows);
  PairLossReport report{0.0, Matrix::zeros(p1.rows, p1.cols), Matrix::zeros(p1.rows, p1.cols)};
  std::vector<double> row_terms(p1.rows);
  for (std::size_t r = 0; r < p1.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < p1.cols; ++c) {
      const double p = p1(r, c);
      const double q = p2(r, c);
      const double a = std::max(p, kLogClamp);
      const double b = std::max(q, kLogClamp);
      const double log_ratio = std::log(a) - std::log(b);
      // KL(p||q) + KL(q||p) collapses to (p - q) * (log p - log q) per entry.
      acc += (p - q) * log_ratio;
      report.grad_first(r, c) = inv_k * (log_ratio + (p > kLogClamp ? (p - q) / a : 0.0));
      report.grad_second(r, c) = inv_k * (-log_ratio + (q > kLogClamp ? (q - p) / b : 0.0));
    }
    row_terms[r] = acc;
  }
  report.value = pairwise_sum(row_terms) * inv_k;
  return report;
}

CriticalPairs select_critical_pairs(const ScoreGrid& conf_high, const RealGrid& csa_high,
                                    const ScoreGrid& conf_low, const RealGrid& csa_low,
                                    std::size_t k, const ResolutionPair& pair, Pairing mode) {
  pair.validate();
  if (!(conf_high.geometry.dims == pair.high) || !(conf_low.geometry.dims == pair.low)) {
    throw ShapeError("confidence grids do not match the resolution pair");
  }
  CriticalPairs out;
  out.high = select_critical(conf_high, csa_high, k);
  if (mode == Pairing::Independent) {
    out.low = select_critical(conf_low, csa_low, k);
    return out;
  }
  if (!(csa_low.dims == pair.low) || csa_low.values.size() != pair.low.count()) {
    throw ShapeError("low-resolution anisotropy grid does not match the resolution pair");
  }
  out.low.resolution = pair.low;
  out.low.indices = pair_across_resolutions(out.high.indices, pair);
  out.low.ranking_score.reserve(k);
  for (std::size_t i : out.low.indices) {
    out.low.ranking_score.push_back(conf_low.scores[i] * csa_low.values[i]);
  }
  return out;
}

AlignmentReport critical_alignment(const FeatureGrid& high_scores, const FeatureGrid& low_scores,
                                   std::span<const std::size_t> high_indices,
                                   std::span<const std::size_t> low_indices) {
  if (high_indices.size() != low_indices.size()) {
    throw ShapeError("paired critical sets differ in size");
  }
  if (high_scores.channels != low_scores.channels) {
    throw ShapeError("score grids disagree on channel count");
  }
  const Matrix p_high = voxel_distributions(high_scores, high_indices);
  const Matrix p_low = voxel_distributions(low_scores, low_indices);
  const PairLossReport loss = circulated_loss(p_high, p_low);
  return AlignmentReport{
      loss.value,
      distributions_backward(high_scores, high_indices, p_high, loss.grad_first),
      distributions_backward(low_scores, low_indices, p_low, loss.grad_second)};
}

void ObjectiveWeights::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValidationError("circulated-loss weight gamma must be >= 0");
  }
}

namespace {

void accumulate(std::vector<double>& dst, const std::vector<double>& src, double scale,
                std::size_t level) {
  if (dst.size() != src.size()) {
    throw ShapeError("gradient size mismatch at level " + std::to_string(level));
  }
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace

ObjectiveReport total_objective(std::span<const LevelTerms> levels, double circulated_value,
                                std::span<const std::vector<double>> circulated_gradients,
                                const ObjectiveWeights& weights) {
  weights.validate();
  if (!circulated_gradients.empty() && circulated_gradients.size() != levels.size()) {
    throw ShapeError("circulated gradients must cover every level");
  }
  ObjectiveReport report;
  std::vector<double> level_values;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const LevelToggles on = i < weights.levels.size() ? weights.levels[i] : LevelToggles{};
    const LevelTerms& t = levels[i];
    std::vector<double> grad(t.csa_ce.gradient.size(), 0.0);
    if (on.csa_ce) {
      level_values.push_back(t.csa_ce.value);
      accumulate(grad, t.csa_ce.gradient, 1.0, i);
    }
    if (on.lovasz) {
      if (!t.lovasz) throw ValidationError("lovasz term enabled but not supplied");
      level_values.push_back(t.lovasz->value);
      accumulate(grad, t.lovasz->gradient, 1.0, i);
    }
    if (on.scal) {
      if (!t.scal) throw ValidationError("scene-class affinity term enabled but not supplied");
      level_values.push_back(t.scal->value);
      accumulate(grad, t.scal->gradient, 1.0, i);
    }
    if (!circulated_gradients.empty() && weights.gamma != 0.0) {
      accumulate(grad, circulated_gradients[i], weights.gamma, i);
    }
    report.level_gradients.push_back(std::move(grad));
  }
  report.value = pairwise_sum(level_values) + weights.gamma * circulated_value;
  return report;
}

}  // namespace voxalign
