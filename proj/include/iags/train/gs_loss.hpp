// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

namespace iags::train {

struct GsLossWeights {
    double l2 = 1.0;
    double l1 = 1.0;
    double depth = 1.0;
};

struct GsLossTerms {
    /// Squared error against the refined frame on M^mlp | M^refine, divided by H*W*3.
    double l2 = 0.0;
    /// Absolute error against the initial frame on the complement, divided by H*W*3.
    double l1 = 0.0;
    /// Pearson(D, D_hat) over pixels where both depths are finite.
    double pearson = 0.0;
    bool zero_variance = false;
    double total = 0.0;
};

struct GsLossResult {
    GsLossTerms terms;
    ColorImage grad_color;
    ScalarMap grad_depth;
};

/// total = l2 + l1 - pearson (each with its weight). Gradients are taken with respect to the render
/// and rendered depth; the L1 subgradient is 0 where the render equals the initial frame.
GsLossResult gs_loss(const ColorImage& render, const ColorImage& refined, const ColorImage& initial, const Mask& mlp,
                     const Mask& refine_mask, const ScalarMap& rendered_depth, const ScalarMap& cond_depth,
                     const GsLossWeights& weights = {});

} // namespace iags::train
