// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/metrics.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iags {

ErrorSum squared_error(const ColorImage& a, const ColorImage& b, const Mask* mask)
{
    if (!a.same_shape(b) || a.channels() != b.channels() || (mask && !mask->same_shape(a)))
        throw Error(ErrorCategory::InvalidInput, "squared_error: image dimensions differ");
    ErrorSum e;
    const int c = a.channels();
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        if (mask && !(*mask)[p])
            continue;
        for (int k = 0; k < c; ++k) {
            const double d = a[p * c + k] - b[p * c + k];
            e.squared += d * d;
        }
        e.samples += c;
    }
    return e;
}

double psnr(const ErrorSum& err)
{
    if (err.samples == 0)
        return std::numeric_limits<double>::quiet_NaN();
    const double mse = err.squared / static_cast<double>(err.samples);
    if (mse <= 0.0)
        return kPsnrCap;
    return std::min(kPsnrCap, -10.0 * std::log10(mse));
}

double psnr(const ColorImage& a, const ColorImage& b, const Mask* mask) { return psnr(squared_error(a, b, mask)); }

double masked_psnr(const std::vector<ColorImage>& a, const std::vector<ColorImage>& b, const std::vector<Mask>& masks)
{
    if (a.size() != b.size() || a.size() != masks.size())
        throw Error(ErrorCategory::InvalidInput, "masked_psnr: view counts differ");
    ErrorSum total;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const ErrorSum e = squared_error(a[i], b[i], &masks[i]);
        total.squared += e.squared;
        total.samples += e.samples;
    }
    return psnr(total);
}

double mask_iou(const std::vector<Mask>& a, const std::vector<Mask>& b)
{
    if (a.size() != b.size())
        throw Error(ErrorCategory::InvalidInput, "mask_iou: view counts differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].same_shape(b[i]))
            throw Error(ErrorCategory::InvalidInput, "mask_iou: mask dimensions differ");
        for (std::size_t p = 0; p < a[i].size(); ++p) {
            inter += (a[i][p] && b[i][p]) ? 1 : 0;
            uni += (a[i][p] || b[i][p]) ? 1 : 0;
        }
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace iags
