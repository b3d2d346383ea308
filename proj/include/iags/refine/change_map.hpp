// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

namespace iags::refine {

/// Per-tier edit strength, scaled by the current noise level s.
struct TierWeights {
    double max = 1.0; // predicted inconsistent (M^mlp)
    double mid = 0.6; // consistent but generated (!M^mlp & M^refine)
    double min = 0.15; // validated visible content
};

/// w = max*s on M^mlp, mid*s on !M^mlp & M^refine, min*s elsewhere.
ScalarMap change_map(const Mask& mlp, const Mask& refine_mask, double noise_level, const TierWeights& tiers = {});

/// Whether denoising step t of T replaces the evolving estimate with the noised original:
/// (T - t) / T < 1 - w, decided exactly for the binary value of w (equivalently t > T * w).
bool should_substitute(long t, long total_steps, double w);

} // namespace iags::refine
