// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_NUMERIC_HPP
#define VOXALIGN_NUMERIC_HPP

#include <span>

namespace voxalign {

// Pairwise (cascade) summation. The result is a fixed function of the input
// order, independent of thread count.
double pairwise_sum(std::span<const double> values);

// Numerically stable softmax of `logits` into `out` (same length).
void softmax(std::span<const double> logits, std::span<double> out);

// log(sum(exp(logits))) with max-shift.
double log_sum_exp(std::span<const double> logits);

}  // namespace voxalign

#endif  // VOXALIGN_NUMERIC_HPP
