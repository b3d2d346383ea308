// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

namespace iags::train {

struct PearsonResult {
    double value = 0.0;
    /// Either sequence had zero variance; value is reported as 0.
    bool zero_variance = false;
};

/// Sample correlation of two equal-length sequences (length >= 2).
PearsonResult pearson(std::span<const double> x, std::span<const double> y);

/// d pearson(x, y) / d y. Zero when either sequence has zero variance.
std::vector<double> pearson_grad_y(std::span<const double> x, std::span<const double> y);

} // namespace iags::train
