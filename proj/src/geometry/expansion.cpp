// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/geometry/expansion.hpp"

#include "iags/common/error.hpp"
#include "iags/geometry/masks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iags::geometry {

double depth_range(const ScalarMap& depth)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double d : depth.values()) {
        if (std::isfinite(d) && d > 0.0) {
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    return hi >= lo ? hi - lo : 0.0;
}

Mask refine_mask(const PosedRender& render, const PointCloud& cloud)
{
    Mask out = render.pix_mask;
    for (std::size_t px = 0; px < render.winner.size(); ++px) {
        const long w = render.winner[px];
        if (w >= 0 && cloud.points[static_cast<std::size_t>(w)].origin == PointOrigin::Inpainted)
            out[px] = 1;
    }
    return out;
}

ExpansionResult progressive_view_expansion(const ColorImage& ref_image, const ScalarMap& ref_depth, const CameraView& cam_ref,
                                           const std::vector<CameraView>& trajectory, std::vector<std::size_t> aux_views,
                                           ImageInpainter& inpainter, DepthEstimator& depth_estimator,
                                           const ExpansionConfig& config)
{
    for (std::size_t idx : aux_views)
        if (idx >= trajectory.size())
            throw Error(ErrorCategory::InvalidInput, "auxiliary view index " + std::to_string(idx) + " is outside the trajectory");

    ExpansionResult result;
    UnprojectResult lifted = unproject(ref_image, ref_depth, cam_ref, PointOrigin::Reference);
    result.reference_cloud = std::move(lifted.cloud);
    result.skipped_reference_pixels = lifted.skipped;
    if (result.reference_cloud.empty())
        throw Error(ErrorCategory::InvalidInput, "reference depth has no valid pixels");

    const double margin = config.relative_margin * depth_range(ref_depth);
    result.eps_occ = margin;
    result.eps_add = margin;

    const Aabb bounds = cloud_bounds(result.reference_cloud, config.bounds_inflate);
    const OcclusionVolume volume =
        build_occlusion_volume(ref_depth, cam_ref, bounds, voxel_size_for(bounds, config.voxel_resolution), margin);

    if (config.sort_by_offset) {
        std::vector<CameraView> aux_cams;
        for (std::size_t idx : aux_views)
            aux_cams.push_back(trajectory[idx]);
        const auto order = order_by_offset(cam_ref, aux_cams);
        std::vector<std::size_t> sorted;
        for (std::size_t o : order)
            sorted.push_back(aux_views[o]);
        aux_views = std::move(sorted);
    }

    PointCloud cloud = result.reference_cloud;
    std::vector<CameraView> prior_cams{cam_ref};
    for (std::size_t view : aux_views) {
        const CameraView& cam = trajectory[view];
        const PosedRender render = render_points(cloud, cam);
        const ScalarMap occ_depth = render_occlusion_depth(volume, cam);
        const Mask occ = occlusion_mask(render.pix_mask, render.depth, occ_depth);

        ColorImage filled;
        ScalarMap estimated;
        try {
            filled = inpainter.inpaint(render.color, occ, cam, view);
            estimated = depth_estimator.estimate(filled, cam, view);
        } catch (const Error& e) {
            throw Error(e.category(), "view " + std::to_string(view) + ": " + e.what());
        } catch (const std::exception& e) {
            throw Error(ErrorCategory::Refiner, "view " + std::to_string(view) + ": " + e.what());
        }
        if (!filled.same_shape(cam.width, cam.height) || filled.channels() != 3 || !estimated.same_shape(cam.width, cam.height))
            throw Error(ErrorCategory::MalformedResponse, "view " + std::to_string(view) + ": handle returned wrong dimensions");

        const Mask add = depth_consistency_add_mask(estimated, occ, cam, make_prior_views(cloud, prior_cams), margin);
        UnprojectResult added = unproject(filled, estimated, cam, PointOrigin::Inpainted, &add);
        result.steps.push_back({view, mask_count(occ), added.cloud.size()});
        cloud.append(added.cloud);
        prior_cams.push_back(cam);
    }

    result.cloud = std::move(cloud);
    for (const CameraView& cam : trajectory) {
        const PosedRender ref_render = render_points(result.reference_cloud, cam);
        result.occlusion_masks.push_back(
            occlusion_mask(ref_render.pix_mask, ref_render.depth, render_occlusion_depth(volume, cam)));
        PosedRender final_render = render_points(result.cloud, cam);
        result.pix_masks.push_back(final_render.pix_mask);
        result.refine_masks.push_back(refine_mask(final_render, result.cloud));
        result.renders.push_back(std::move(final_render));
    }
    return result;
}

} // namespace iags::geometry
