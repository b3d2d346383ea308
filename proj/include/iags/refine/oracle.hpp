// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/refine/refiner.hpp"

#include <cstdint>
#include <vector>

namespace iags::refine {

/// out = w * GT + (1 - w) * in + eta, eta ~ N(0, (noise * w)^2), clamped to [0,1].
/// The noise stream depends only on `seed`.
RefineResponse oracle_refine(const RefineRequest& request, const std::vector<ColorImage>& ground_truth,
                             std::uint64_t seed, double noise = 0.02);

/// Stand-in for the video model: blends toward known ground truth. Call k uses seed (seed, k).
class OracleRefiner final : public Refiner {
public:
    OracleRefiner(std::vector<ColorImage> ground_truth, std::uint64_t seed, double noise = 0.02)
        : ground_truth_(std::move(ground_truth)), seed_(seed), noise_(noise)
    {
    }

    RefineResponse run(const RefineRequest& request) override;
    std::size_t calls() const noexcept { return calls_; }

private:
    std::vector<ColorImage> ground_truth_;
    std::uint64_t seed_;
    double noise_;
    std::size_t calls_ = 0;
};

} // namespace iags::refine
