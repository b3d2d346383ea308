// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/predictor/predictor.hpp"
#include "iags/splat/rasterizer.hpp"
#include "iags/splat/splat.hpp"

#include <array>
#include <vector>

namespace iags::train {

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-15;
};

/// Per-group step sizes. Mean rates are multiplied by the scene extent and decay exponentially
/// from `means` to `means_final` over the run.
struct FieldLearningRates {
    double means = 1.6e-4;
    double means_final = 1.6e-6;
    double colors = 2.5e-3;
    double opacities = 5e-2;
    double scales = 5e-3;
    double quats = 1e-3;
};

inline constexpr int kSplatParams = 14;

/// Adam over every splat parameter; bias correction counts steps per splat, so splats created by
/// densification start fresh.
class FieldOptimizer {
public:
    FieldOptimizer(const FieldLearningRates& rates, double scene_extent, long total_iterations, AdamSettings adam = {});

    void resize(std::size_t splats);
    /// One update at `iteration` (0-based); renormalizes quaternions afterwards.
    void step(splat::SplatField& field, const splat::FieldGrads& grads, long iteration);
    /// Carry state across density control: output splat i continues input splat source[i] (-1 = new).
    void remap(const std::vector<long>& source);

    double mean_rate(long iteration) const;

private:
    FieldLearningRates rates_;
    double extent_;
    long total_;
    AdamSettings adam_;
    std::vector<std::array<double, kSplatParams>> m_, v_;
    std::vector<long> steps_;
};

class PredictorOptimizer {
public:
    explicit PredictorOptimizer(double rate, AdamSettings adam = {0.9, 0.999, 1e-8}) : rate_(rate), adam_(adam) {}

    void step(predictor::PredictorParams& phi, const predictor::PredictorGrad& grad);
    void reset();

private:
    double rate_;
    AdamSettings adam_;
    std::vector<double> m_, v_;
    long steps_ = 0;
};

} // namespace iags::train
