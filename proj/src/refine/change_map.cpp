// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/refine/change_map.hpp"

#include "iags/common/error.hpp"

#include <cmath>

namespace iags::refine {

ScalarMap change_map(const Mask& mlp, const Mask& refine_mask, double noise_level, const TierWeights& tiers)
{
    if (!mlp.same_shape(refine_mask))
        throw Error(ErrorCategory::InvalidInput, "change_map: mask dimensions differ");
    if (!(noise_level >= 0.0 && noise_level <= 1.0))
        throw Error(ErrorCategory::InvalidInput, "change_map: noise level must lie in [0, 1]");
    const double hi = tiers.max * noise_level;
    const double mid = tiers.mid * noise_level;
    const double lo = tiers.min * noise_level;
    ScalarMap w = make_scalar(mlp.width(), mlp.height());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = mlp[i] ? hi : (refine_mask[i] ? mid : lo);
    return w;
}

bool should_substitute(long t, long total_steps, double w)
{
    if (total_steps < 1 || t < 0 || t > total_steps)
        throw Error(ErrorCategory::InvalidInput, "should_substitute: need 0 <= t <= T and T >= 1");
    if (!std::isfinite(w))
        throw Error(ErrorCategory::InvalidInput, "should_substitute: non-finite change weight");
    // (T - t)/T < 1 - w  <=>  t > T*w. T*w = p + e exactly, with e recovered by fma; t and T are
    // small integers, so t is exact and comparing against p + e needs e only when t == p.
    const double total = static_cast<double>(total_steps);
    const double step = static_cast<double>(t);
    const double p = total * w;
    const double e = std::fma(total, w, -p);
    return step > p || (step == p && e < 0.0);
}

} // namespace iags::refine
