// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

namespace iags::predictor {

/// Per-pixel mean absolute color error over channels.
ScalarMap residual_map(const ColorImage& render, const ColorImage& target);

/// R divided by its maximum; all zeros stay zero.
ScalarMap normalize_residual(const ScalarMap& residual);

/// Value at 1-based rank ceil(tau * N) of the sorted residuals, so that a fraction tau of pixels is <= it.
double quantile_threshold(const ScalarMap& residual, double tau);

/// {R > quantile_threshold(R, tau)}, before dilation.
Mask raw_residual_mask(const ScalarMap& residual, double tau);

/// 3x3 box dilation (maximum filter); the border is not padded with ones.
Mask dilate3x3(const Mask& mask);

/// Outlier mask: dilated raw mask.
Mask residual_mask(const ScalarMap& residual, double tau);

struct MaskBounds {
    double tau_low = 0.7;
    double tau_high = 0.95;
};

/// U is the floor on inlier probability (1 outside the tau_low outliers), L the ceiling
/// (0 only on the tau_high outliers). U <= L pointwise.
struct BoundMaps {
    Mask upper;
    Mask lower;
};

BoundMaps compute_bounds(const ScalarMap& residual, const MaskBounds& bounds);

} // namespace iags::predictor
