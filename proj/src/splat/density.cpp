// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/splat/density.hpp"

#include "iags/common/error.hpp"

#include <cmath>

namespace iags::splat {

void GradientStats::resize(std::size_t n)
{
    sum_.assign(n, 0.0);
    count_.assign(n, 0);
}

void GradientStats::reset()
{
    std::fill(sum_.begin(), sum_.end(), 0.0);
    std::fill(count_.begin(), count_.end(), 0);
}

void GradientStats::add(const FieldGrads& grads, const RenderOutput& forward)
{
    if (grads.splats.size() != sum_.size() || forward.projected.size() != sum_.size())
        throw Error(ErrorCategory::InvalidInput, "gradient statistics size mismatch");
    const double sx = 0.5 * forward.width, sy = 0.5 * forward.height;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
        if (!forward.projected[i])
            continue;
        const Eigen::Vector2d& g = grads.splats[i].mean2d;
        sum_[i] += std::hypot(g.x() * sx, g.y() * sy);
        ++count_[i];
    }
}

DensityResult density_control(const SplatField& field, const GradientStats& stats, double scene_extent,
                              const DensityConfig& config, std::mt19937_64& rng)
{
    if (stats.size() != field.size())
        throw Error(ErrorCategory::InvalidInput, "density_control: statistics do not match the field");

    DensityResult result;
    result.field.background = field.background;
    std::vector<Splat> grown;
    std::vector<long> grown_source;
    std::vector<bool> removed(field.size(), false);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::size_t budget = config.max_splats > field.size() ? config.max_splats - field.size() : 0;

    for (std::size_t i = 0; i < field.size() && budget > 0; ++i) {
        if (stats.mean(i) <= config.grad_threshold)
            continue;
        const Splat& s = field.splats[i];
        const Eigen::Vector3d scale = s.scale();
        if (scale.maxCoeff() <= config.dense_fraction * scene_extent) {
            grown.push_back(s);
            grown_source.push_back(-1);
            ++result.cloned;
            --budget;
        } else {
            const Eigen::Matrix3d rot = rotation_from_quat(s.quat);
            for (int k = 0; k < 2; ++k) {
                Splat child = s;
                const Eigen::Vector3d n(normal(rng), normal(rng), normal(rng));
                child.mean = s.mean + rot * scale.cwiseProduct(n);
                child.log_scale = s.log_scale.array() - std::log(config.split_factor);
                grown.push_back(child);
                grown_source.push_back(-1);
            }
            removed[i] = true;
            ++result.split;
            --budget;
        }
    }

    const auto keep = [&](const Splat& s) { return s.opacity() >= config.prune_opacity; };
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (removed[i])
            continue;
        if (!keep(field.splats[i])) {
            ++result.pruned;
            continue;
        }
        result.field.splats.push_back(field.splats[i]);
        result.source.push_back(static_cast<long>(i));
    }
    for (std::size_t k = 0; k < grown.size(); ++k) {
        if (!keep(grown[k])) {
            ++result.pruned;
            continue;
        }
        result.field.splats.push_back(grown[k]);
        result.source.push_back(grown_source[k]);
    }
    return result;
}

} // namespace iags::splat
