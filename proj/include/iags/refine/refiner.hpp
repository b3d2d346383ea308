// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

#include <string>
#include <vector>

namespace iags::refine {

/// One video refinement call. Frames play the role of the latent video (identity codec).
struct RefineRequest {
    std::vector<ColorImage> frames;
    std::vector<ScalarMap> change_maps;
    /// Conditioning depth, forwarded verbatim. May be empty.
    std::vector<ScalarMap> depth_maps;
    std::string text_prompt;
    double noise_level = 0.0;
    long total_steps = 50;
    /// Meters per 16-bit code when depth crosses a file boundary.
    double depth_scale = 0.001;
};

struct RefineResponse {
    std::vector<ColorImage> frames;
};

/// External video refiner.
class Refiner {
public:
    virtual ~Refiner() = default;
    virtual RefineResponse run(const RefineRequest& request) = 0;
};

/// Throws InvalidInput naming the offending frame.
void validate_request(const RefineRequest& request);

/// Validates the request, invokes the refiner and checks the response: frame count and dimensions
/// must match (MalformedResponse), values must be finite (MalformedResponse) and are clamped to [0,1].
/// Failures other than iags::Error are reported as Refiner errors.
RefineResponse refine(const RefineRequest& request, Refiner& refiner);

} // namespace iags::refine
