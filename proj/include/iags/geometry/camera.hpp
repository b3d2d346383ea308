// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <vector>

namespace iags::geometry {

/// Rigid world-to-camera transform: p_cam = rotation * p_world + translation.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& world) const { return rotation * world + translation; }
    Eigen::Vector3d inverse_apply(const Eigen::Vector3d& cam) const { return rotation.transpose() * (cam - translation); }
    /// Camera center in world coordinates.
    Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
};

/// Pinhole camera. Pixel (u, v) has its center at integer coordinates; +z looks forward, +y points down.
struct CameraView {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 1;
    int height = 1;
    Pose pose;

    /// Throws InvalidInput if focal lengths, image size or rotation are not valid.
    void validate() const;

    Eigen::Vector2d project_camera(const Eigen::Vector3d& cam) const
    {
        return {fx * cam.x() / cam.z() + cx, fy * cam.y() / cam.z() + cy};
    }
    Eigen::Vector3d unproject_camera(double u, double v, double depth) const
    {
        return {(u - cx) / fx * depth, (v - cy) / fy * depth, depth};
    }
    bool contains(long u, long v) const noexcept { return u >= 0 && v >= 0 && u < width && v < height; }
};

/// Nearest-pixel location of a camera-space point, or false when behind the camera or outside the image.
bool project_to_pixel(const CameraView& cam, const Eigen::Vector3d& cam_point, int& u, int& v);

/// Orthonormal world-to-camera rotation looking from `eye` toward `target`, +y of the image pointing along `down`.
Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target, const Eigen::Vector3d& down);

/// Camera-center distance and relative rotation angle between two poses.
struct PoseOffset {
    double translation = 0.0;
    double angle = 0.0;
    auto operator<=>(const PoseOffset&) const = default;
};
PoseOffset pose_offset(const Pose& from, const Pose& to);

/// Indices of `cams` sorted by increasing offset from `reference` (translation, then angle, then index).
std::vector<std::size_t> order_by_offset(const CameraView& reference, const std::vector<CameraView>& cams);

/// Trajectory text: one view per line, "fx fy cx cy w h r00..r22 t0 t1 t2". '#' starts a comment.
std::vector<CameraView> read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const std::vector<CameraView>& cams);
std::vector<CameraView> parse_trajectory(const std::string& text, const std::string& source);
std::string format_trajectory(const std::vector<CameraView>& cams);

} // namespace iags::geometry
