// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/splat/splat.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace iags::splat {

struct RasterSettings {
    double near_plane = 0.01;
    /// Added to the screen-space covariance diagonal (px^2).
    double blur = 0.3;
    double alpha_max = 0.999;
    double alpha_min = 1.0 / 255.0;
    /// Depth composited behind the last splat.
    double background_depth = 100.0;
    int tile_size = 16;
    /// Stop compositing a pixel once transmittance would fall below this; 0 composites every splat.
    double min_transmittance = 0.0;
};

struct ProjectedSplat {
    Eigen::Vector3d cam_point = Eigen::Vector3d::Zero();
    Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov2d = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d conic = Eigen::Matrix2d::Identity();
    Eigen::Matrix3d cov3d = Eigen::Matrix3d::Identity();
    /// Perspective Jacobian at cam_point.
    Eigen::Matrix<double, 2, 3> jacobian = Eigen::Matrix<double, 2, 3>::Zero();
    double depth = 0.0;
    double opacity = 0.0;
    /// Inclusive pixel bounding box of the footprint where alpha can reach alpha_min.
    int x_min = 0, x_max = -1, y_min = 0, y_max = -1;
};

/// EWA projection of one splat; nullopt when the mean is not in front of the near plane.
std::optional<ProjectedSplat> project_splat(const Splat& splat, const geometry::CameraView& cam,
                                            const RasterSettings& settings = {});

struct Contribution {
    std::int32_t splat = 0;
    /// Alpha after clamping.
    double alpha = 0.0;
    bool clamped = false;
};

struct RenderOutput {
    ColorImage color;
    ScalarMap depth;
    ScalarMap alpha;
    ScalarMap transmittance;

    // Forward record consumed by the backward pass.
    std::vector<std::optional<ProjectedSplat>> projected;
    std::vector<std::size_t> pixel_offsets;
    std::vector<Contribution> contributions;
    std::size_t field_size = 0;
    int width = 0;
    int height = 0;
    RasterSettings settings;
    Eigen::Vector3d background = Eigen::Vector3d::Zero();

    std::size_t contribution_count(std::size_t pixel) const { return pixel_offsets[pixel + 1] - pixel_offsets[pixel]; }
};

/// Front-to-back alpha compositing over a 16x16 tile grid. Splats are ordered by projected mean depth.
RenderOutput rasterize(const SplatField& field, const geometry::CameraView& cam, const RasterSettings& settings = {});

/// Upstream gradients on the rendered maps. Empty maps mean zero gradient.
struct RenderGrads {
    ColorImage color;
    ScalarMap depth;
    ScalarMap alpha;
};

struct SplatGrad {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
    Eigen::Vector4d quat = Eigen::Vector4d::Zero();
    double opacity_logit = 0.0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
    /// Screen-space mean gradient (px), used for densification statistics.
    Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
};

struct FieldGrads {
    std::vector<SplatGrad> splats;
};

/// Analytic gradient of sum(upstream * rendered maps) with respect to every splat parameter.
/// Throws InvalidInput if `forward` was not produced from this field and camera.
FieldGrads rasterize_backward(const SplatField& field, const geometry::CameraView& cam, const RenderOutput& forward,
                              const RenderGrads& upstream);

} // namespace iags::splat
