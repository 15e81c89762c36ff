// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#include "voxalign/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace voxalign {

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 64;
  if (values.size() <= kLeaf) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_sum_exp(std::span<const double> logits) {
  if (logits.empty()) return -std::numeric_limits<double>::infinity();
  const double peak = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(peak)) return peak;
  double acc = 0.0;
  for (double z : logits) acc += std::exp(z - peak);
  return peak + std::log(acc);
}

void softmax(std::span<const double> logits, std::span<double> out) {
  if (logits.empty()) return;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  const double inv = 1.0 / total;
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] *= inv;
}

}  // namespace voxalign
