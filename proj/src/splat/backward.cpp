// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/error.hpp"
#include "iags/splat/rasterizer.hpp"

#include <cmath>

namespace iags::splat {

namespace {

struct ScreenGrad {
    Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d conic = Eigen::Matrix2d::Zero();
    double opacity = 0.0;
    double depth = 0.0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();
};

// dL/dq for the rotation of the normalized quaternion, given dL/dR.
Eigen::Vector4d quat_grad(const Eigen::Vector4d& raw, const Eigen::Matrix3d& g_rot)
{
    const double n = raw.norm();
    const Eigen::Vector4d q = raw / n;
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Eigen::Matrix3d dw, dx, dy, dz;
    dw << 0, -2 * z, 2 * y, 2 * z, 0, -2 * x, -2 * y, 2 * x, 0;
    dx << 0, 2 * y, 2 * z, 2 * y, -4 * x, -2 * w, 2 * z, 2 * w, -4 * x;
    dy << -4 * y, 2 * x, 2 * w, 2 * x, 0, 2 * z, -2 * w, 2 * z, -4 * y;
    dz << -4 * z, -2 * w, 2 * x, 2 * w, -4 * z, 2 * y, 2 * x, 2 * y, 0;
    const Eigen::Vector4d g_unit(g_rot.cwiseProduct(dw).sum(), g_rot.cwiseProduct(dx).sum(), g_rot.cwiseProduct(dy).sum(),
                                 g_rot.cwiseProduct(dz).sum());
    return (g_unit - q * q.dot(g_unit)) / n;
}

} // namespace

FieldGrads rasterize_backward(const SplatField& field, const geometry::CameraView& cam, const RenderOutput& forward,
                              const RenderGrads& upstream)
{
    if (forward.field_size != field.size() || forward.width != cam.width || forward.height != cam.height ||
        forward.projected.size() != field.size() || forward.pixel_offsets.size() != forward.color.pixel_count() + 1)
        throw Error(ErrorCategory::InvalidInput, "rasterize_backward: forward record does not match field/camera");
    const bool has_color = !upstream.color.empty();
    const bool has_depth = !upstream.depth.empty();
    const bool has_alpha = !upstream.alpha.empty();
    if ((has_color && (!upstream.color.same_shape(cam.width, cam.height) || upstream.color.channels() != 3)) ||
        (has_depth && !upstream.depth.same_shape(cam.width, cam.height)) ||
        (has_alpha && !upstream.alpha.same_shape(cam.width, cam.height)))
        throw Error(ErrorCategory::InvalidInput, "rasterize_backward: upstream gradient dimensions do not match");

    const RasterSettings& settings = forward.settings;
    std::vector<ScreenGrad> screen(field.size());
    std::vector<double> t_before;

    const std::size_t npix = forward.color.pixel_count();
    for (std::size_t px = 0; px < npix; ++px) {
        const std::size_t b = forward.pixel_offsets[px], e = forward.pixel_offsets[px + 1];
        if (b == e)
            continue;
        const Eigen::Vector3d g_c = has_color
            ? Eigen::Vector3d(upstream.color[px * 3], upstream.color[px * 3 + 1], upstream.color[px * 3 + 2])
            : Eigen::Vector3d::Zero();
        const double g_d = has_depth ? upstream.depth[px] : 0.0;
        const double g_a = has_alpha ? upstream.alpha[px] : 0.0;
        if (g_c.isZero(0.0) && g_d == 0.0 && g_a == 0.0)
            continue;

        t_before.resize(e - b);
        double t = 1.0;
        for (std::size_t k = b; k < e; ++k) {
            t_before[k - b] = t;
            t *= 1.0 - forward.contributions[k].alpha;
        }

        // Value of everything behind the current splat, normalized by its own transmittance.
        Eigen::Vector3d behind_c = forward.background;
        double behind_d = settings.background_depth;
        double behind_a = 0.0;
        const int x = static_cast<int>(px % static_cast<std::size_t>(cam.width));
        const int y = static_cast<int>(px / static_cast<std::size_t>(cam.width));
        for (std::size_t k = e; k-- > b;) {
            const Contribution& c = forward.contributions[k];
            const std::size_t idx = static_cast<std::size_t>(c.splat);
            const ProjectedSplat& p = *forward.projected[idx];
            const Eigen::Vector3d& col = field.splats[idx].color;
            const double a = c.alpha;
            const double tb = t_before[k - b];

            ScreenGrad& sg = screen[idx];
            sg.color += g_c * (a * tb);
            sg.depth += g_d * a * tb;
            const double g_alpha = tb * (g_c.dot(col - behind_c) + g_d * (p.depth - behind_d) + g_a * (1.0 - behind_a));

            behind_c = a * col + (1.0 - a) * behind_c;
            behind_d = a * p.depth + (1.0 - a) * behind_d;
            behind_a = a + (1.0 - a) * behind_a;

            if (c.clamped)
                continue;
            const Eigen::Vector2d d(x - p.mean2d.x(), y - p.mean2d.y());
            const double q = d.dot(p.conic * d);
            const double gauss = std::exp(-0.5 * q);
            sg.opacity += g_alpha * gauss;
            const double g_q = g_alpha * (-0.5 * a);
            // q = d^T A d, d = pixel - mean
            sg.mean2d += g_q * (-2.0 * (p.conic * d));
            sg.conic += g_q * (d * d.transpose());
        }
    }

    FieldGrads grads;
    grads.splats.resize(field.size());
    const Eigen::Matrix3d& w_rot = cam.pose.rotation;
    for (std::size_t i = 0; i < field.size(); ++i) {
        if (!forward.projected[i])
            continue;
        const ProjectedSplat& p = *forward.projected[i];
        const ScreenGrad& sg = screen[i];
        const Splat& s = field.splats[i];
        SplatGrad& g = grads.splats[i];

        g.color = sg.color;
        g.mean2d = sg.mean2d;
        const double sigma = p.opacity;
        g.opacity_logit = sg.opacity * sigma * (1.0 - sigma);

        // conic = cov2d^{-1}
        const Eigen::Matrix2d g_cov2d = -p.conic.transpose() * sg.conic * p.conic.transpose();
        const Eigen::Matrix<double, 2, 3> m = p.jacobian * w_rot;
        const Eigen::Matrix3d g_cov3d = m.transpose() * g_cov2d * m;
        const Eigen::Matrix<double, 2, 3> g_m = (g_cov2d + g_cov2d.transpose()) * m * p.cov3d;
        const Eigen::Matrix<double, 2, 3> g_j = g_m * w_rot.transpose();

        const double tx = p.cam_point.x(), ty = p.cam_point.y(), tz = p.cam_point.z();
        const double fx = cam.fx, fy = cam.fy;
        const double z2 = tz * tz, z3 = z2 * tz;
        Eigen::Vector3d g_t = Eigen::Vector3d::Zero();
        // Projected mean.
        g_t.x() += sg.mean2d.x() * fx / tz;
        g_t.y() += sg.mean2d.y() * fy / tz;
        g_t.z() += -sg.mean2d.x() * fx * tx / z2 - sg.mean2d.y() * fy * ty / z2;
        // Composited depth.
        g_t.z() += sg.depth;
        // Jacobian entries.
        g_t.z() += g_j(0, 0) * (-fx / z2) + g_j(1, 1) * (-fy / z2);
        g_t.x() += g_j(0, 2) * (-fx / z2);
        g_t.z() += g_j(0, 2) * (2.0 * fx * tx / z3);
        g_t.y() += g_j(1, 2) * (-fy / z2);
        g_t.z() += g_j(1, 2) * (2.0 * fy * ty / z3);
        g.mean = w_rot.transpose() * g_t;

        // Sigma = (R S)(R S)^T
        const Eigen::Matrix3d rot = rotation_from_quat(s.quat);
        const Eigen::Vector3d scale = s.scale();
        const Eigen::Matrix3d rs = rot * scale.asDiagonal();
        const Eigen::Matrix3d g_rs = (g_cov3d + g_cov3d.transpose()) * rs;
        for (int k = 0; k < 3; ++k)
            g.log_scale(k) = g_rs.col(k).dot(rot.col(k)) * scale(k);
        const Eigen::Matrix3d g_rot = g_rs * scale.asDiagonal();
        g.quat = quat_grad(s.quat, g_rot);
    }
    return grads;
}

} // namespace iags::splat
