// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <vector>

namespace iags::geometry {

enum class PointOrigin : std::uint8_t { Reference, Inpainted };

struct Point {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
    PointOrigin origin = PointOrigin::Reference;
};

struct PointCloud {
    std::vector<Point> points;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }
    void append(const PointCloud& other) { points.insert(points.end(), other.points.begin(), other.points.end()); }
};

struct UnprojectResult {
    PointCloud cloud;
    /// Pixels dropped for non-finite or non-positive depth.
    std::size_t skipped = 0;
};

/// Lifts every pixel with finite positive depth to a world-space point.
UnprojectResult unproject(const ColorImage& image, const ScalarMap& depth, const CameraView& cam, PointOrigin origin,
                          const Mask* only = nullptr);

/// Result of z-buffered point rendering. `winner` holds the index of the point that owns each pixel, -1 if none.
struct PosedRender {
    ColorImage color;
    ScalarMap depth;
    Mask pix_mask;
    std::vector<long> winner;
};

/// One-pixel nearest splatting with a z-buffer; ties at equal depth go to the lower point index.
PosedRender render_points(const PointCloud& cloud, const CameraView& cam);

/// Plain-text point lines "x y z r g b tag" with tag "reference" or "inpainted".
void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_point_cloud(const std::filesystem::path& path);

} // namespace iags::geometry
