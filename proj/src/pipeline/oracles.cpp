// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/pipeline/oracles.hpp"

#include "iags/common/error.hpp"
#include "iags/common/seed.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace iags::pipeline {

ColorImage OracleInpainter::inpaint(const ColorImage& image, const Mask& mask, const geometry::CameraView&, std::size_t view)
{
    if (view >= gt_.size() || !gt_[view].same_shape(image) || !mask.same_shape(image))
        throw Error(ErrorCategory::InvalidInput, fmt::format("oracle inpainter: no matching ground truth for view {}", view));
    ColorImage out = image;
    for (std::size_t p = 0; p < mask.size(); ++p)
        if (mask[p])
            for (int c = 0; c < 3; ++c)
                out[p * 3 + c] = gt_[view][p * 3 + c];
    return out;
}

ScalarMap OracleDepthEstimator::estimate(const ColorImage& image, const geometry::CameraView&, std::size_t view)
{
    if (view >= gt_.size() || !gt_[view].same_shape(image))
        throw Error(ErrorCategory::InvalidInput, fmt::format("oracle depth: no matching ground truth for view {}", view));
    ScalarMap d = gt_[view];
    if (noise_ > 0.0) {
        std::mt19937_64 rng(derive_seed(seed_, calls_++));
        std::normal_distribution<double> normal(0.0, noise_);
        for (double& v : d.storage()) {
            const double eta = normal(rng);
            if (std::isfinite(v))
                v = std::max(1e-3, v + eta);
        }
    }
    return d;
}

ColorImage RefinerInpainter::inpaint(const ColorImage& image, const Mask& mask, const geometry::CameraView&, std::size_t)
{
    refine::RefineRequest req;
    req.frames = {image};
    ScalarMap w = make_scalar(mask.width(), mask.height());
    for (std::size_t p = 0; p < w.size(); ++p)
        w[p] = mask[p] ? 1.0 : 0.0;
    req.change_maps = {std::move(w)};
    req.text_prompt = prompt_;
    req.noise_level = 1.0;
    return std::move(refine::refine(req, refiner_).frames.front());
}

} // namespace iags::pipeline
