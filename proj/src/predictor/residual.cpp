// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/predictor/residual.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace iags::predictor {

ScalarMap residual_map(const ColorImage& render, const ColorImage& target)
{
    if (!render.same_shape(target) || render.channels() != target.channels())
        throw Error(ErrorCategory::InvalidInput, "residual_map: image shapes differ");
    ScalarMap r = make_scalar(render.width(), render.height());
    const int c = render.channels();
    for (std::size_t p = 0; p < r.size(); ++p) {
        double sum = 0.0;
        for (int k = 0; k < c; ++k)
            sum += std::abs(render[p * c + k] - target[p * c + k]);
        r[p] = sum / c;
    }
    return r;
}

ScalarMap normalize_residual(const ScalarMap& residual)
{
    ScalarMap out = residual;
    const double peak = residual.empty() ? 0.0 : *std::max_element(residual.storage().begin(), residual.storage().end());
    if (peak > 0.0)
        for (double& v : out.storage())
            v /= peak;
    return out;
}

double quantile_threshold(const ScalarMap& residual, double tau)
{
    if (residual.empty())
        throw Error(ErrorCategory::InvalidInput, "quantile_threshold: empty residual");
    if (!(tau > 0.0 && tau < 1.0))
        throw Error(ErrorCategory::InvalidInput, "quantile_threshold: tau must lie in (0, 1)");
    std::vector<double> sorted = residual.storage();
    const std::size_t n = sorted.size();
    // tau * N is often an integer that rounds a hair above itself (0.7 * 10 = 7.000000000000001).
    const double exact = tau * static_cast<double>(n);
    std::size_t rank = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    return sorted[rank - 1];
}

Mask raw_residual_mask(const ScalarMap& residual, double tau)
{
    const double rho = quantile_threshold(residual, tau);
    Mask m = make_mask(residual.width(), residual.height());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = residual[i] > rho ? 1 : 0;
    return m;
}

Mask dilate3x3(const Mask& mask)
{
    const int w = mask.width();
    const int h = mask.height();
    // Separable: horizontal then vertical maximum.
    Mask row = make_mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            row(x, y) = mask(x, y) | (x > 0 ? mask(x - 1, y) : 0) | (x + 1 < w ? mask(x + 1, y) : 0);
    Mask out = make_mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out(x, y) = row(x, y) | (y > 0 ? row(x, y - 1) : 0) | (y + 1 < h ? row(x, y + 1) : 0);
    return out;
}

Mask residual_mask(const ScalarMap& residual, double tau)
{
    return dilate3x3(raw_residual_mask(residual, tau));
}

BoundMaps compute_bounds(const ScalarMap& residual, const MaskBounds& bounds)
{
    if (!(bounds.tau_low < bounds.tau_high))
        throw Error(ErrorCategory::InvalidInput, "compute_bounds: tau_low must be below tau_high");
    return {mask_not(residual_mask(residual, bounds.tau_low)), mask_not(residual_mask(residual, bounds.tau_high))};
}

} // namespace iags::predictor
