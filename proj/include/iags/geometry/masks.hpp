// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/geometry/point_cloud.hpp"

#include <vector>

namespace iags::geometry {

/// Occlusion-aware inpainting mask: pix_mask OR (depth > occ_depth). A sentinel occlusion depth never triggers.
Mask occlusion_mask(const Mask& pix_mask, const ScalarMap& depth, const ScalarMap& occ_depth);

/// A depth map of existing geometry as seen from one prior camera.
struct PriorView {
    CameraView cam;
    ScalarMap depth;
};

/// Renders `cloud` into each prior camera once; reuse the result across calls.
std::vector<PriorView> make_prior_views(const PointCloud& cloud, const std::vector<CameraView>& prior_cams);

/// Accepts a candidate pixel of `cam_new` when its lifted point does not sit in front of existing geometry
/// (by more than `eps_add`) in any prior view. Only pixels in `candidates` are considered.
Mask depth_consistency_add_mask(const ScalarMap& candidate_depth, const Mask& candidates, const CameraView& cam_new,
                                const std::vector<PriorView>& priors, double eps_add);

Mask depth_consistency_add_mask(const ScalarMap& candidate_depth, const Mask& candidates, const CameraView& cam_new,
                                const PointCloud& cloud, const std::vector<CameraView>& prior_cams, double eps_add);

} // namespace iags::geometry
