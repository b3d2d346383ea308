// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

namespace iags::predictor {

// All losses are per-pixel means. U, L and the prior mask M_p are binary.

/// mean(max(U - H, 0) + max(H - L, 0))
double supervision_loss(const ScalarMap& h, const Mask& upper, const Mask& lower);
/// mean(max(M_p - H, 0))
double prior_loss(const ScalarMap& h, const Mask& prior);
/// -mean(M_p * (1 - H) * R), R normalized to [0,1].
double discard_loss(const ScalarMap& h, const Mask& prior, const ScalarMap& residual);

struct MaskLossWeights {
    double prior = 1.0;
    double discard = 0.1;
};

struct MaskLossTerms {
    double supervision = 0.0;
    double prior = 0.0;
    double discard = 0.0;
    double total = 0.0;
};

MaskLossTerms mask_loss(const ScalarMap& h, const Mask& upper, const Mask& lower, const Mask& prior,
                        const ScalarMap& residual, const MaskLossWeights& weights);

/// dL_mask/dH per pixel. Hinge subgradients are 0 at the kink.
ScalarMap mask_loss_grad(const ScalarMap& h, const Mask& upper, const Mask& lower, const Mask& prior,
                         const ScalarMap& residual, const MaskLossWeights& weights);

} // namespace iags::predictor
