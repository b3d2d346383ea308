// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"

#include <cstddef>

namespace iags::geometry {

/// External image inpainting model. Returns a full frame; only masked pixels are expected to change.
class ImageInpainter {
public:
    virtual ~ImageInpainter() = default;
    virtual ColorImage inpaint(const ColorImage& image, const Mask& mask, const CameraView& cam, std::size_t view) = 0;
};

/// External monocular depth estimator (metric depth, sentinel where undefined).
class DepthEstimator {
public:
    virtual ~DepthEstimator() = default;
    virtual ScalarMap estimate(const ColorImage& image, const CameraView& cam, std::size_t view) = 0;
};

} // namespace iags::geometry
