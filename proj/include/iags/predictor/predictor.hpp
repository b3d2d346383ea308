// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>

namespace iags::predictor {

/// H x W x K per-pixel features.
using FeatureMap = Image<double>;

inline constexpr int kFeatureChannels = 9;

/// Rendered RGB, target RGB and |render - target| per channel, each standardized over the image
/// to zero mean and unit variance (constant channels become zero).
FeatureMap compute_features(const ColorImage& render, const ColorImage& target);

/// Per-pixel linear head: H = sigmoid(w . f + b).
struct PredictorParams {
    Eigen::VectorXd weights;
    double bias = 0.0;

    int channels() const noexcept { return static_cast<int>(weights.size()); }
    bool operator==(const PredictorParams& o) const { return weights == o.weights && bias == o.bias; }
};

/// Weights drawn from N(0, 0.01^2) by a generator seeded with `seed`; bias 0.
PredictorParams init_predictor(int channels, std::uint64_t seed);

/// Inlier probability map.
ScalarMap predict(const FeatureMap& features, const PredictorParams& phi);

/// Outlier mask: 1 where H < 0.5.
Mask mlp_mask(const ScalarMap& inlier_prob);

struct PredictorGrad {
    Eigen::VectorXd weights;
    double bias = 0.0;
};

/// Chain rule from dL/dH through the sigmoid to the head parameters.
PredictorGrad predictor_backward(const FeatureMap& features, const ScalarMap& inlier_prob, const ScalarMap& grad_h);

/// "K bias w_1 .. w_K" on one line.
std::string format_predictor(const PredictorParams& phi);
PredictorParams parse_predictor(const std::string& text, const std::string& source);
void write_predictor(const std::filesystem::path& path, const PredictorParams& phi);
PredictorParams read_predictor(const std::filesystem::path& path);

} // namespace iags::predictor
