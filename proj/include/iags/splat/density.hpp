// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/splat/rasterizer.hpp"
#include "iags/splat/splat.hpp"

#include <cstddef>
#include <random>
#include <vector>

namespace iags::splat {

struct DensityConfig {
    double prune_opacity = 0.005;
    /// Mean screen-space positional gradient norm (NDC units) above which a splat is densified.
    double grad_threshold = 0.0002;
    /// Splats whose largest scale exceeds this fraction of the scene extent are split, others cloned.
    double dense_fraction = 0.01;
    double split_factor = 1.6;
    std::size_t max_splats = 5000;
};

/// Running mean of per-splat screen-space gradient norms between densification steps.
class GradientStats {
public:
    void resize(std::size_t n);
    std::size_t size() const noexcept { return sum_.size(); }
    /// Adds one rendered view's gradients; splats not projected in `forward` are not counted.
    void add(const FieldGrads& grads, const RenderOutput& forward);
    double mean(std::size_t i) const { return count_[i] ? sum_[i] / count_[i] : 0.0; }
    void reset();

private:
    std::vector<double> sum_;
    std::vector<std::size_t> count_;
};

struct DensityResult {
    SplatField field;
    /// For each output splat, the input splat it continues (optimizer state carries over), or -1 if new.
    std::vector<long> source;
    std::size_t pruned = 0;
    std::size_t cloned = 0;
    std::size_t split = 0;
};

/// Clone small and split large high-gradient splats, then prune splats with opacity below the threshold.
DensityResult density_control(const SplatField& field, const GradientStats& stats, double scene_extent,
                              const DensityConfig& config, std::mt19937_64& rng);

} // namespace iags::splat
