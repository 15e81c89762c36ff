// Copyright 2026 The voxalign Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXALIGN_PARALLEL_HPP
#define VOXALIGN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace voxalign {

// Worker count used by data-parallel kernels. 0 restores the default
// (VOXALIGN_THREADS if set, otherwise 1).
void set_num_threads(unsigned n);
unsigned num_threads();

// Runs body(lo, hi) over disjoint chunks covering [begin, end). Bodies must
// only write to locations owned by their chunk; results never depend on the
// thread count.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace voxalign

#endif  // VOXALIGN_PARALLEL_HPP
