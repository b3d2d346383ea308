// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace iags::splat {

/// One anisotropic Gaussian, stored in unconstrained form.
/// quat is (w, x, y, z); scale = exp(log_scale); opacity = sigmoid(opacity_logit).
struct Splat {
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
    Eigen::Vector4d quat = Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    double opacity_logit = 0.0;
    Eigen::Vector3d color = Eigen::Vector3d::Zero();

    Eigen::Vector3d scale() const { return log_scale.array().exp(); }
    double opacity() const { return 1.0 / (1.0 + std::exp(-opacity_logit)); }

    bool operator==(const Splat&) const = default;
};

struct SplatField {
    std::vector<Splat> splats;
    Eigen::Vector3d background = Eigen::Vector3d::Zero();

    std::size_t size() const noexcept { return splats.size(); }
    bool empty() const noexcept { return splats.empty(); }
    bool operator==(const SplatField&) const = default;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Rotation of the normalized quaternion.
Eigen::Matrix3d rotation_from_quat(const Eigen::Vector4d& quat);

/// Sigma = R S S^T R^T with S = diag(exp(log_scale)).
Eigen::Matrix3d covariance(const Eigen::Vector3d& log_scale, const Eigen::Vector4d& quat);

/// Renormalizes every quaternion to unit length.
void normalize_quats(SplatField& field);

/// True when every parameter is finite.
bool is_finite(const SplatField& field);

} // namespace iags::splat
