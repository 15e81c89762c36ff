// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_CDA_HPP
#define VOXALIGN_CDA_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "voxalign/csa.hpp"
#include "voxalign/grid.hpp"
#include "voxalign/lift.hpp"

namespace voxalign {

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  static Matrix zeros(std::size_t rows, std::size_t cols) {
    return Matrix{rows, cols, std::vector<double>(rows * cols, 0.0)};
  }
  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Scalar per voxel, unconstrained range.
struct RealGrid {
  GridDims dims;
  std::vector<double> values;
};

struct CriticalSet {
  GridDims resolution;
  std::vector<std::size_t> indices;   // ranked, best first
  std::vector<double> ranking_score;  // confidence * anisotropy
  Matrix distributions;               // filled by voxel_distributions
};

// Max softmax probability per voxel; lies in [1/N, 1].
ScoreGrid occupancy_confidence(const FeatureGrid& scores);

enum class CsaResample { Max, Mean };

// Pools the anisotropy weight onto `target` (each extent must divide the
// map's). Max-pooling keeps a block's strongest boundary.
RealGrid csa_to_resolution(const AnisotropyMap& csa, GridDims target,
                           CsaResample mode = CsaResample::Max);

// The k voxels with the largest confidence * anisotropy, ties to the smaller
// linear index. Throws ShapeError if k exceeds the voxel count.
CriticalSet select_critical(const ScoreGrid& conf, const RealGrid& csa_at_res, std::size_t k);

// High voxel (x, y, z) -> low voxel (x / lambda, y / lambda, z / lambda).
std::vector<std::size_t> pair_across_resolutions(std::span<const std::size_t> high_indices,
                                                 const ResolutionPair& pair);

// Softmax over channels for each selected voxel, one row per index.
Matrix voxel_distributions(const FeatureGrid& scores, std::span<const std::size_t> indices);

// Pulls a gradient on the distributions returned by voxel_distributions back
// onto the raw scores. Rows sharing a voxel accumulate.
std::vector<double> distributions_backward(const FeatureGrid& scores,
                                           std::span<const std::size_t> indices,
                                           const Matrix& distributions,
                                           const Matrix& grad_distributions);

inline constexpr double kLogClamp = 1e-12;

struct PairLossReport {
  double value = 0.0;
  Matrix grad_first;
  Matrix grad_second;
};

// Mean over rows of KL(p1 || p2) + KL(p2 || p1), natural log, probabilities
// clamped to kLogClamp inside the logarithms. Gradients are the exact
// derivatives of that clamped expression.
PairLossReport circulated_loss(const Matrix& p1, const Matrix& p2);

enum class Pairing {
  Correspondence,  // select at high resolution, pair each pick with its parent
  Independent,     // top-k at each level, rows paired by rank
};

struct CriticalPairs {
  CriticalSet high;
  CriticalSet low;
};

// Chooses paired critical voxels for the two levels of `pair`.
CriticalPairs select_critical_pairs(const ScoreGrid& conf_high, const RealGrid& csa_high,
                                    const ScoreGrid& conf_low, const RealGrid& csa_low,
                                    std::size_t k, const ResolutionPair& pair,
                                    Pairing mode = Pairing::Correspondence);

struct AlignmentReport {
  double value = 0.0;
  std::vector<double> grad_high;  // layout of the high-resolution scores
  std::vector<double> grad_low;
};

// Distributions at the paired voxels, circulated loss, and the gradient with
// respect to both score grids.
AlignmentReport critical_alignment(const FeatureGrid& high_scores, const FeatureGrid& low_scores,
                                   std::span<const std::size_t> high_indices,
                                   std::span<const std::size_t> low_indices);

// Caller-supplied loss terms (e.g. Lovasz, scene-class affinity).
using PluginLoss = std::function<LossReport(const FeatureGrid& scores, const LabelGrid& labels)>;

struct LevelToggles {
  bool csa_ce = true;
  bool lovasz = false;
  bool scal = false;
};

struct ObjectiveWeights {
  double gamma = 1.0;
  std::vector<LevelToggles> levels;  // missing entries use LevelToggles{}

  void validate() const;
};

struct LevelTerms {
  LossReport csa_ce;
  std::optional<LossReport> lovasz;
  std::optional<LossReport> scal;
};

struct ObjectiveReport {
  double value = 0.0;
  std::vector<std::vector<double>> level_gradients;
};

// sum over levels of the enabled occupancy terms + gamma * circulated term.
// `circulated_gradients` holds one score-space gradient per level (may be
// empty when gamma is 0 or no alignment term is used).
ObjectiveReport total_objective(std::span<const LevelTerms> levels, double circulated_value,
                                std::span<const std::vector<double>> circulated_gradients,
                                const ObjectiveWeights& weights);

}  // namespace voxalign

#endif  // VOXALIGN_CDA_HPP
