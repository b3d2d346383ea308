// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/geometry/occlusion.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <cmath>

namespace iags::geometry {

Aabb cloud_bounds(const PointCloud& cloud, double inflate)
{
    if (cloud.empty())
        throw Error(ErrorCategory::InvalidInput, "cannot bound an empty point cloud");
    Aabb box;
    box.min = box.max = cloud.points.front().position;
    for (const Point& p : cloud.points) {
        box.min = box.min.cwiseMin(p.position);
        box.max = box.max.cwiseMax(p.position);
    }
    // Flat clouds still need a volume.
    Eigen::Vector3d ext = box.extent();
    const double floor = std::max(1e-3, ext.maxCoeff() * 1e-2);
    ext = ext.cwiseMax(floor);
    const Eigen::Vector3d mid = 0.5 * (box.min + box.max);
    const Eigen::Vector3d half = 0.5 * ext * (1.0 + inflate);
    box.min = mid - half;
    box.max = mid + half;
    return box;
}

OcclusionVolume::OcclusionVolume(const Eigen::Vector3d& origin, double voxel_size, std::array<int, 3> dims)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims)
{
    if (!(voxel_size > 0.0))
        throw Error(ErrorCategory::InvalidInput, "voxel size must be positive");
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw Error(ErrorCategory::InvalidInput, "occlusion volume dims must be at least 1");
    occupancy_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], false);
}

std::size_t OcclusionVolume::occupied_count() const
{
    return static_cast<std::size_t>(std::count(occupancy_.begin(), occupancy_.end(), true));
}

double voxel_size_for(const Aabb& bounds, int resolution)
{
    if (resolution < 1)
        throw Error(ErrorCategory::InvalidInput, "voxel resolution must be at least 1");
    return bounds.extent().maxCoeff() / resolution;
}

OcclusionVolume build_occlusion_volume(const ScalarMap& ref_depth, const CameraView& cam_ref, const Aabb& bounds,
                                       double voxel_size, double margin)
{
    cam_ref.validate();
    if (bounds.degenerate())
        throw Error(ErrorCategory::InvalidInput, "occlusion bounds are degenerate");
    if (!ref_depth.same_shape(cam_ref.width, cam_ref.height))
        throw Error(ErrorCategory::InvalidInput, "reference depth does not match the reference camera");

    std::array<int, 3> dims{};
    for (int a = 0; a < 3; ++a)
        dims[a] = std::max(1, static_cast<int>(std::ceil(bounds.extent()(a) / voxel_size - 1e-9)));
    OcclusionVolume vol(bounds.min, voxel_size, dims);

    for (int k = 0; k < dims[2]; ++k) {
        for (int j = 0; j < dims[1]; ++j) {
            for (int i = 0; i < dims[0]; ++i) {
                const Eigen::Vector3d c = cam_ref.pose.apply(vol.center(i, j, k));
                int u = 0, v = 0;
                if (!project_to_pixel(cam_ref, c, u, v)) {
                    vol.set_occupied(i, j, k, true);
                    continue;
                }
                const double d = ref_depth(u, v);
                if (std::isfinite(d) && c.z() > d + margin)
                    vol.set_occupied(i, j, k, true);
            }
        }
    }
    return vol;
}

ScalarMap render_occlusion_depth(const OcclusionVolume& volume, const CameraView& cam)
{
    ScalarMap depth = make_scalar(cam.width, cam.height, kDepthSentinel);
    const auto& dims = volume.dims();
    for (int k = 0; k < dims[2]; ++k) {
        for (int j = 0; j < dims[1]; ++j) {
            for (int i = 0; i < dims[0]; ++i) {
                if (!volume.occupied(i, j, k))
                    continue;
                const Eigen::Vector3d c = cam.pose.apply(volume.center(i, j, k));
                int u = 0, v = 0;
                if (project_to_pixel(cam, c, u, v) && c.z() < depth(u, v))
                    depth(u, v) = c.z();
            }
        }
    }
    return depth;
}

} // namespace iags::geometry
