// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/refine/refiner.hpp"

#include "iags/common/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace iags::refine {

void validate_request(const RefineRequest& request)
{
    const std::size_t n = request.frames.size();
    if (n == 0)
        throw Error(ErrorCategory::InvalidInput, "refine request: no frames");
    if (request.change_maps.size() != n)
        throw Error(ErrorCategory::InvalidInput,
                    fmt::format("refine request: {} frames but {} change maps", n, request.change_maps.size()));
    if (!request.depth_maps.empty() && request.depth_maps.size() != n)
        throw Error(ErrorCategory::InvalidInput,
                    fmt::format("refine request: {} frames but {} depth maps", n, request.depth_maps.size()));
    if (!(request.noise_level >= 0.0 && request.noise_level <= 1.0))
        throw Error(ErrorCategory::InvalidInput, "refine request: noise level must lie in [0, 1]");
    if (request.total_steps < 1)
        throw Error(ErrorCategory::InvalidInput, "refine request: total steps must be >= 1");
    if (!(request.depth_scale > 0.0))
        throw Error(ErrorCategory::InvalidInput, "refine request: depth scale must be positive");
    const int w = request.frames[0].width();
    const int h = request.frames[0].height();
    for (std::size_t i = 0; i < n; ++i) {
        const ColorImage& f = request.frames[i];
        if (!f.same_shape(w, h) || f.channels() != 3)
            throw Error(ErrorCategory::InvalidInput, fmt::format("refine request: frame {} is not {}x{} RGB", i, w, h));
        if (!std::all_of(f.storage().begin(), f.storage().end(), [](double v) { return std::isfinite(v); }))
            throw Error(ErrorCategory::InvalidInput, fmt::format("refine request: frame {} has non-finite values", i));
        const ScalarMap& c = request.change_maps[i];
        if (!c.same_shape(w, h) || c.channels() != 1)
            throw Error(ErrorCategory::InvalidInput, fmt::format("refine request: change map {} has wrong size", i));
        if (!std::all_of(c.storage().begin(), c.storage().end(), [](double v) { return v >= 0.0 && v <= 1.0; }))
            throw Error(ErrorCategory::InvalidInput, fmt::format("refine request: change map {} leaves [0, 1]", i));
        if (!request.depth_maps.empty() && !request.depth_maps[i].same_shape(w, h))
            throw Error(ErrorCategory::InvalidInput, fmt::format("refine request: depth map {} has wrong size", i));
    }
}

RefineResponse refine(const RefineRequest& request, Refiner& refiner)
{
    validate_request(request);
    RefineResponse response;
    try {
        response = refiner.run(request);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCategory::Refiner, fmt::format("refiner failed: {}", e.what()));
    }

    const std::size_t n = request.frames.size();
    if (response.frames.size() != n)
        throw Error(ErrorCategory::MalformedResponse,
                    fmt::format("refiner returned {} frames, expected {}", response.frames.size(), n));
    for (std::size_t i = 0; i < n; ++i) {
        ColorImage& f = response.frames[i];
        const ColorImage& in = request.frames[i];
        if (!f.same_shape(in) || f.channels() != 3)
            throw Error(ErrorCategory::MalformedResponse,
                        fmt::format("refined frame {}: got {}x{}x{}, expected {}x{}x3", i, f.width(), f.height(),
                                    f.channels(), in.width(), in.height()));
        for (double v : f.storage())
            if (!std::isfinite(v))
                throw Error(ErrorCategory::MalformedResponse, fmt::format("refined frame {}: non-finite value", i));
    }
    for (ColorImage& f : response.frames)
        for (double& v : f.storage())
            v = std::clamp(v, 0.0, 1.0);
    return response;
}

} // namespace iags::refine
