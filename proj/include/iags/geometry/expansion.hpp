// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/geometry/handles.hpp"
#include "iags/geometry/occlusion.hpp"
#include "iags/geometry/point_cloud.hpp"

#include <cstddef>
#include <vector>

namespace iags::geometry {

struct ExpansionConfig {
    /// Occlusion and add margins as a fraction of the reference depth range.
    double relative_margin = 0.01;
    int voxel_resolution = 128;
    double bounds_inflate = 0.2;
    /// Process auxiliary views from small to large offset. Disabling keeps the caller's order.
    bool sort_by_offset = true;
};

struct AuxStep {
    std::size_t view = 0;
    std::size_t inpaint_pixels = 0;
    std::size_t accepted = 0;
};

struct ExpansionResult {
    PointCloud reference_cloud;
    PointCloud cloud;
    /// Per trajectory view.
    std::vector<Mask> pix_masks;
    std::vector<Mask> occlusion_masks;
    std::vector<Mask> refine_masks;
    std::vector<PosedRender> renders;
    std::vector<AuxStep> steps;
    double eps_occ = 0.0;
    double eps_add = 0.0;
    std::size_t skipped_reference_pixels = 0;
};

/// Warp-and-inpaint initialization. `aux_views` index into `trajectory`. Occlusion masks are computed
/// against the reference cloud; pix/refine masks and renders against the final cloud.
ExpansionResult progressive_view_expansion(const ColorImage& ref_image, const ScalarMap& ref_depth, const CameraView& cam_ref,
                                           const std::vector<CameraView>& trajectory, std::vector<std::size_t> aux_views,
                                           ImageInpainter& inpainter, DepthEstimator& depth_estimator,
                                           const ExpansionConfig& config = {});

/// Refine mask of one view: pixels won by an inpainted point, plus pixels with no point at all.
Mask refine_mask(const PosedRender& render, const PointCloud& cloud);

/// Depth range (max - min over finite positive pixels); 0 for empty maps.
double depth_range(const ScalarMap& depth);

} // namespace iags::geometry
