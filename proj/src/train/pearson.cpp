// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/train/pearson.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace iags::train {

namespace {

struct Moments {
    double mean_x = 0.0, mean_y = 0.0;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw Error(ErrorCategory::InvalidInput, "pearson: sequence lengths differ");
    if (x.size() < 2)
        throw Error(ErrorCategory::InvalidInput, "pearson: need at least two samples");
    Moments m;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        m.mean_x += x[i];
        m.mean_y += y[i];
    }
    m.mean_x /= n;
    m.mean_y /= n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - m.mean_x;
        const double dy = y[i] - m.mean_y;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    return m;
}

} // namespace

PearsonResult pearson(std::span<const double> x, std::span<const double> y)
{
    const Moments m = moments(x, y);
    if (m.sxx <= 0.0 || m.syy <= 0.0)
        return {0.0, true};
    const double r = m.sxy / std::sqrt(m.sxx * m.syy);
    return {std::clamp(r, -1.0, 1.0), false};
}

std::vector<double> pearson_grad_y(std::span<const double> x, std::span<const double> y)
{
    const Moments m = moments(x, y);
    std::vector<double> g(y.size(), 0.0);
    if (m.sxx <= 0.0 || m.syy <= 0.0)
        return g;
    // r = sxy / sqrt(sxx syy);  dr/dy_i = (dx_i - r sqrt(sxx/syy) dy_i) / sqrt(sxx syy)
    const double denom = std::sqrt(m.sxx * m.syy);
    const double r = m.sxy / denom;
    const double ratio = std::sqrt(m.sxx / m.syy);
    for (std::size_t i = 0; i < y.size(); ++i)
        g[i] = ((x[i] - m.mean_x) - r * ratio * (y[i] - m.mean_y)) / denom;
    return g;
}

} // namespace iags::train
