// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/splat/splat.hpp"

namespace iags::splat {

Eigen::Matrix3d rotation_from_quat(const Eigen::Vector4d& quat)
{
    const Eigen::Vector4d q = quat.normalized();
    const double w = q(0), x = q(1), y = q(2), z = q(3);
    Eigen::Matrix3d r;
    r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
        2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
        2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
    return r;
}

Eigen::Matrix3d covariance(const Eigen::Vector3d& log_scale, const Eigen::Vector4d& quat)
{
    const Eigen::Matrix3d m = rotation_from_quat(quat) * log_scale.array().exp().matrix().asDiagonal();
    Eigen::Matrix3d sigma = m * m.transpose();
    // Exact symmetry.
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    return sigma;
}

void normalize_quats(SplatField& field)
{
    for (Splat& s : field.splats) {
        const double n = s.quat.norm();
        if (n > 0.0)
            s.quat /= n;
        else
            s.quat = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    }
}

bool is_finite(const SplatField& field)
{
    if (!field.background.allFinite())
        return false;
    for (const Splat& s : field.splats)
        if (!s.mean.allFinite() || !s.log_scale.allFinite() || !s.quat.allFinite() || !std::isfinite(s.opacity_logit) ||
            !s.color.allFinite())
            return false;
    return true;
}

} // namespace iags::splat
