// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/splat/rasterizer.hpp"

#include <algorithm>
#include <cmath>

namespace iags::splat {

std::optional<ProjectedSplat> project_splat(const Splat& splat, const geometry::CameraView& cam,
                                            const RasterSettings& settings)
{
    ProjectedSplat p;
    p.cam_point = cam.pose.apply(splat.mean);
    const double x = p.cam_point.x(), y = p.cam_point.y(), z = p.cam_point.z();
    if (!(z > settings.near_plane))
        return std::nullopt;

    p.depth = z;
    p.mean2d = cam.project_camera(p.cam_point);
    p.jacobian << cam.fx / z, 0.0, -cam.fx * x / (z * z),
                  0.0, cam.fy / z, -cam.fy * y / (z * z);
    p.cov3d = covariance(splat.log_scale, splat.quat);
    const Eigen::Matrix<double, 2, 3> m = p.jacobian * cam.pose.rotation;
    p.cov2d = m * p.cov3d * m.transpose();
    p.cov2d(0, 1) = p.cov2d(1, 0) = 0.5 * (p.cov2d(0, 1) + p.cov2d(1, 0));
    p.cov2d(0, 0) += settings.blur;
    p.cov2d(1, 1) += settings.blur;
    const double det = p.cov2d(0, 0) * p.cov2d(1, 1) - p.cov2d(0, 1) * p.cov2d(1, 0);
    p.conic << p.cov2d(1, 1) / det, -p.cov2d(0, 1) / det,
               -p.cov2d(1, 0) / det, p.cov2d(0, 0) / det;
    p.opacity = splat.opacity();

    // alpha >= alpha_min requires d^T conic d <= 2 ln(opacity / alpha_min); that ellipse's
    // axis-aligned extent is sqrt(c * cov_xx) by sqrt(c * cov_yy).
    if (p.opacity < settings.alpha_min)
        return p;
    const double c = 2.0 * std::log(p.opacity / settings.alpha_min);
    const double ex = std::sqrt(c * p.cov2d(0, 0));
    const double ey = std::sqrt(c * p.cov2d(1, 1));
    const double lo_x = std::floor(p.mean2d.x() - ex), hi_x = std::ceil(p.mean2d.x() + ex);
    const double lo_y = std::floor(p.mean2d.y() - ey), hi_y = std::ceil(p.mean2d.y() + ey);
    if (!(hi_x >= 0.0 && hi_y >= 0.0 && lo_x < cam.width && lo_y < cam.height))
        return p;
    p.x_min = static_cast<int>(std::max(lo_x, 0.0));
    p.y_min = static_cast<int>(std::max(lo_y, 0.0));
    p.x_max = static_cast<int>(std::min(hi_x, static_cast<double>(cam.width - 1)));
    p.y_max = static_cast<int>(std::min(hi_y, static_cast<double>(cam.height - 1)));
    return p;
}

} // namespace iags::splat
