// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/geometry/masks.hpp"

#include "iags/common/error.hpp"

#include <cmath>

namespace iags::geometry {

Mask occlusion_mask(const Mask& pix_mask, const ScalarMap& depth, const ScalarMap& occ_depth)
{
    if (!pix_mask.same_shape(depth) || !pix_mask.same_shape(occ_depth))
        throw Error(ErrorCategory::InvalidInput, "occlusion_mask: map dimensions differ");
    Mask out = make_mask(pix_mask.width(), pix_mask.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (pix_mask[i] || depth[i] > occ_depth[i]) ? 1 : 0;
    return out;
}

std::vector<PriorView> make_prior_views(const PointCloud& cloud, const std::vector<CameraView>& prior_cams)
{
    std::vector<PriorView> priors;
    priors.reserve(prior_cams.size());
    for (const CameraView& cam : prior_cams)
        priors.push_back({cam, render_points(cloud, cam).depth});
    return priors;
}

Mask depth_consistency_add_mask(const ScalarMap& candidate_depth, const Mask& candidates, const CameraView& cam_new,
                                const std::vector<PriorView>& priors, double eps_add)
{
    if (!candidate_depth.same_shape(cam_new.width, cam_new.height) || !candidates.same_shape(candidate_depth))
        throw Error(ErrorCategory::InvalidInput, "depth_consistency_add_mask: dimension mismatch");

    Mask accept = make_mask(cam_new.width, cam_new.height);
    for (int v = 0; v < cam_new.height; ++v) {
        for (int u = 0; u < cam_new.width; ++u) {
            if (!candidates(u, v))
                continue;
            const double d = candidate_depth(u, v);
            if (!std::isfinite(d) || d <= 0.0)
                continue;
            const Eigen::Vector3d world = cam_new.pose.inverse_apply(cam_new.unproject_camera(u, v, d));
            bool ok = true;
            for (const PriorView& prior : priors) {
                const Eigen::Vector3d c = prior.cam.pose.apply(world);
                int pu = 0, pv = 0;
                if (!project_to_pixel(prior.cam, c, pu, pv))
                    continue;
                const double existing = prior.depth(pu, pv);
                if (std::isfinite(existing) && c.z() < existing - eps_add) {
                    ok = false;
                    break;
                }
            }
            accept(u, v) = ok ? 1 : 0;
        }
    }
    return accept;
}

Mask depth_consistency_add_mask(const ScalarMap& candidate_depth, const Mask& candidates, const CameraView& cam_new,
                                const PointCloud& cloud, const std::vector<CameraView>& prior_cams, double eps_add)
{
    return depth_consistency_add_mask(candidate_depth, candidates, cam_new, make_prior_views(cloud, prior_cams), eps_add);
}

} // namespace iags::geometry
