// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

#include <vector>

namespace iags {

/// Reported instead of infinity for identical images.
inline constexpr double kPsnrCap = 100.0;

/// Squared error summed over the channels of masked pixels (all pixels when `mask` is null).
struct ErrorSum {
    double squared = 0.0;
    std::size_t samples = 0;
};
ErrorSum squared_error(const ColorImage& a, const ColorImage& b, const Mask* mask = nullptr);

/// PSNR for peak value 1 of the pooled error; kPsnrCap when the error is zero, NaN when no samples.
double psnr(const ErrorSum& err);
double psnr(const ColorImage& a, const ColorImage& b, const Mask* mask = nullptr);

/// PSNR pooled over all views restricted to per-view masks.
double masked_psnr(const std::vector<ColorImage>& a, const std::vector<ColorImage>& b, const std::vector<Mask>& masks);

/// |A & B| / |A | B| pooled over views; 1 when both are empty.
double mask_iou(const std::vector<Mask>& a, const std::vector<Mask>& b);

} // namespace iags
