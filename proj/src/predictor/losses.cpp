// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/predictor/losses.hpp"

#include "iags/common/error.hpp"

#include <algorithm>

namespace iags::predictor {

namespace {

template <class... Maps>
void check_shapes(const ScalarMap& h, const Maps&... maps)
{
    if (!(h.same_shape(maps) && ...) || h.empty())
        throw Error(ErrorCategory::InvalidInput, "mask loss: map dimensions differ");
}

} // namespace

double supervision_loss(const ScalarMap& h, const Mask& upper, const Mask& lower)
{
    check_shapes(h, upper, lower);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        sum += std::max(upper[i] - h[i], 0.0) + std::max(h[i] - lower[i], 0.0);
    return sum / static_cast<double>(h.size());
}

double prior_loss(const ScalarMap& h, const Mask& prior)
{
    check_shapes(h, prior);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        sum += std::max(prior[i] - h[i], 0.0);
    return sum / static_cast<double>(h.size());
}

double discard_loss(const ScalarMap& h, const Mask& prior, const ScalarMap& residual)
{
    check_shapes(h, prior, residual);
    double sum = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (prior[i])
            sum += (1.0 - h[i]) * residual[i];
    return -sum / static_cast<double>(h.size());
}

MaskLossTerms mask_loss(const ScalarMap& h, const Mask& upper, const Mask& lower, const Mask& prior,
                        const ScalarMap& residual, const MaskLossWeights& weights)
{
    MaskLossTerms t;
    t.supervision = supervision_loss(h, upper, lower);
    t.prior = prior_loss(h, prior);
    t.discard = discard_loss(h, prior, residual);
    t.total = t.supervision + weights.prior * t.prior + weights.discard * t.discard;
    return t;
}

ScalarMap mask_loss_grad(const ScalarMap& h, const Mask& upper, const Mask& lower, const Mask& prior,
                         const ScalarMap& residual, const MaskLossWeights& weights)
{
    check_shapes(h, upper, lower, prior, residual);
    const double inv_n = 1.0 / static_cast<double>(h.size());
    ScalarMap g = make_scalar(h.width(), h.height());
    for (std::size_t i = 0; i < h.size(); ++i) {
        double d = 0.0;
        if (upper[i] - h[i] > 0.0)
            d -= 1.0;
        if (h[i] - lower[i] > 0.0)
            d += 1.0;
        if (prior[i]) {
            if (1.0 - h[i] > 0.0)
                d -= weights.prior;
            d += weights.discard * residual[i];
        }
        g[i] = d * inv_n;
    }
    return g;
}

} // namespace iags::predictor
