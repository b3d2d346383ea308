// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/geometry/point_cloud.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace iags::geometry {

struct Aabb {
    Eigen::Vector3d min = Eigen::Vector3d::Zero();
    Eigen::Vector3d max = Eigen::Vector3d::Zero();

    Eigen::Vector3d extent() const { return max - min; }
    bool degenerate() const { return !((max - min).array() > 0.0).all(); }
};

/// Bounding box of the cloud, grown by `inflate` times its extent (split evenly on both sides).
Aabb cloud_bounds(const PointCloud& cloud, double inflate = 0.2);

/// Voxel grid over space hidden from a reference camera. Voxel (i,j,k) has center origin + (idx + 0.5) * voxel_size.
class OcclusionVolume {
public:
    OcclusionVolume() = default;
    OcclusionVolume(const Eigen::Vector3d& origin, double voxel_size, std::array<int, 3> dims);

    const Eigen::Vector3d& origin() const noexcept { return origin_; }
    double voxel_size() const noexcept { return voxel_size_; }
    const std::array<int, 3>& dims() const noexcept { return dims_; }
    std::size_t voxel_count() const noexcept { return occupancy_.size(); }

    Eigen::Vector3d center(int i, int j, int k) const
    {
        return origin_ + voxel_size_ * Eigen::Vector3d(i + 0.5, j + 0.5, k + 0.5);
    }
    bool occupied(int i, int j, int k) const { return occupancy_[linear(i, j, k)]; }
    void set_occupied(int i, int j, int k, bool value) { occupancy_[linear(i, j, k)] = value; }
    std::size_t occupied_count() const;

private:
    std::size_t linear(int i, int j, int k) const
    {
        return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
    }

    Eigen::Vector3d origin_ = Eigen::Vector3d::Zero();
    double voxel_size_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<bool> occupancy_ = std::vector<bool>(1, false);
};

/// A voxel is occupied when its center lies behind the reference depth (by more than `margin`)
/// or outside the reference frustum.
OcclusionVolume build_occlusion_volume(const ScalarMap& ref_depth, const CameraView& cam_ref, const Aabb& bounds,
                                       double voxel_size, double margin);

/// Voxel size giving `resolution` cells along the longest box edge.
double voxel_size_for(const Aabb& bounds, int resolution);

/// Per pixel, nearest depth of an occupied voxel center projecting there; sentinel elsewhere.
ScalarMap render_occlusion_depth(const OcclusionVolume& volume, const CameraView& cam);

} // namespace iags::geometry
