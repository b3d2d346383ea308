// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/predictor/predictor.hpp"

#include <cmath>

namespace iags::predictor {

FeatureMap compute_features(const ColorImage& render, const ColorImage& target)
{
    if (!render.same_shape(target) || render.channels() != 3 || target.channels() != 3)
        throw Error(ErrorCategory::InvalidInput, "compute_features: expected two RGB images of equal size");
    const int w = render.width();
    const int h = render.height();
    const std::size_t n = render.pixel_count();
    FeatureMap f(w, h, kFeatureChannels);
    for (std::size_t p = 0; p < n; ++p) {
        for (int c = 0; c < 3; ++c) {
            const double a = render[p * 3 + c];
            const double b = target[p * 3 + c];
            f[p * kFeatureChannels + c] = a;
            f[p * kFeatureChannels + 3 + c] = b;
            f[p * kFeatureChannels + 6 + c] = std::abs(a - b);
        }
    }
    for (int k = 0; k < kFeatureChannels; ++k) {
        double mean = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            mean += f[p * kFeatureChannels + k];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double d = f[p * kFeatureChannels + k] - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        const double inv = var > 1e-24 ? 1.0 / std::sqrt(var) : 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            double& v = f[p * kFeatureChannels + k];
            v = (v - mean) * inv;
        }
    }
    return f;
}

} // namespace iags::predictor
