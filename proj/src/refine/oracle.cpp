// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/refine/oracle.hpp"

#include "iags/common/error.hpp"
#include "iags/common/seed.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace iags::refine {

RefineResponse oracle_refine(const RefineRequest& request, const std::vector<ColorImage>& ground_truth,
                             std::uint64_t seed, double noise)
{
    if (ground_truth.size() != request.frames.size())
        throw Error(ErrorCategory::InvalidInput, fmt::format("oracle refiner: {} ground-truth frames for {} requested",
                                                             ground_truth.size(), request.frames.size()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    RefineResponse out;
    out.frames.reserve(request.frames.size());
    for (std::size_t f = 0; f < request.frames.size(); ++f) {
        const ColorImage& in = request.frames[f];
        const ColorImage& gt = ground_truth[f];
        const ScalarMap& w = request.change_maps[f];
        if (!gt.same_shape(in) || gt.channels() != in.channels())
            throw Error(ErrorCategory::InvalidInput, fmt::format("oracle refiner: ground truth {} has wrong size", f));
        ColorImage r = in;
        const int c = in.channels();
        for (std::size_t p = 0; p < w.size(); ++p) {
            for (int k = 0; k < c; ++k) {
                const std::size_t i = p * c + k;
                // Draw for every sample so the stream does not depend on w.
                const double eta = noise > 0.0 ? noise * w[p] * normal(rng) : 0.0;
                r[i] = std::clamp(w[p] * gt[i] + (1.0 - w[p]) * in[i] + eta, 0.0, 1.0);
            }
        }
        out.frames.push_back(std::move(r));
    }
    return out;
}

RefineResponse OracleRefiner::run(const RefineRequest& request)
{
    return oracle_refine(request, ground_truth_, derive_seed(seed_, calls_++), noise_);
}

} // namespace iags::refine
