// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/geometry/handles.hpp"
#include "iags/refine/refiner.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace iags::pipeline {

/// Replaces masked pixels with the ground-truth frame of the view.
class OracleInpainter final : public geometry::ImageInpainter {
public:
    explicit OracleInpainter(std::vector<ColorImage> ground_truth) : gt_(std::move(ground_truth)) {}
    ColorImage inpaint(const ColorImage& image, const Mask& mask, const geometry::CameraView& cam, std::size_t view) override;

private:
    std::vector<ColorImage> gt_;
};

/// Ground-truth depth plus seeded N(0, noise^2) per pixel; ignores the image.
class OracleDepthEstimator final : public geometry::DepthEstimator {
public:
    OracleDepthEstimator(std::vector<ScalarMap> ground_truth, double noise, std::uint64_t seed)
        : gt_(std::move(ground_truth)), noise_(noise), seed_(seed)
    {
    }
    ScalarMap estimate(const ColorImage& image, const geometry::CameraView& cam, std::size_t view) override;

private:
    std::vector<ScalarMap> gt_;
    double noise_;
    std::uint64_t seed_;
    std::uint64_t calls_ = 0;
};

/// Inpainting through a video refiner: a one-frame request whose change map is 1 on the mask, 0 elsewhere.
class RefinerInpainter final : public geometry::ImageInpainter {
public:
    RefinerInpainter(refine::Refiner& refiner, std::string prompt) : refiner_(refiner), prompt_(std::move(prompt)) {}
    ColorImage inpaint(const ColorImage& image, const Mask& mask, const geometry::CameraView& cam, std::size_t view) override;

private:
    refine::Refiner& refiner_;
    std::string prompt_;
};

} // namespace iags::pipeline
