// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/geometry/camera.hpp"

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace iags::geometry {

void CameraView::validate() const
{
    if (!(fx > 0.0) || !(fy > 0.0))
        throw Error(ErrorCategory::InvalidInput, "camera focal lengths must be positive");
    if (width < 1 || height < 1)
        throw Error(ErrorCategory::InvalidInput, "camera image size must be at least 1x1");
    const Eigen::Matrix3d& r = pose.rotation;
    if (!r.allFinite() || !pose.translation.allFinite())
        throw Error(ErrorCategory::InvalidInput, "camera pose must be finite");
    const double ortho = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho > 1e-6 || std::abs(r.determinant() - 1.0) > 1e-6)
        throw Error(ErrorCategory::InvalidInput, "camera rotation is not a proper rotation");
}

bool project_to_pixel(const CameraView& cam, const Eigen::Vector3d& cam_point, int& u, int& v)
{
    if (!(cam_point.z() > 0.0))
        return false;
    const Eigen::Vector2d p = cam.project_camera(cam_point);
    const double ru = std::round(p.x());
    const double rv = std::round(p.y());
    if (!(ru >= 0.0 && rv >= 0.0 && ru < cam.width && rv < cam.height))
        return false;
    u = static_cast<int>(ru);
    v = static_cast<int>(rv);
    return true;
}

Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target, const Eigen::Vector3d& down)
{
    const Eigen::Vector3d forward = (target - eye).normalized();
    const Eigen::Vector3d right = down.cross(forward).normalized();
    const Eigen::Vector3d new_down = forward.cross(right);
    Pose pose;
    pose.rotation.row(0) = right.transpose();
    pose.rotation.row(1) = new_down.transpose();
    pose.rotation.row(2) = forward.transpose();
    pose.translation = -pose.rotation * eye;
    return pose;
}

PoseOffset pose_offset(const Pose& from, const Pose& to)
{
    PoseOffset off;
    off.translation = (from.center() - to.center()).norm();
    const Eigen::Matrix3d rel = from.rotation * to.rotation.transpose();
    const double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
    off.angle = std::acos(c);
    return off;
}

std::vector<std::size_t> order_by_offset(const CameraView& reference, const std::vector<CameraView>& cams)
{
    std::vector<PoseOffset> offsets;
    offsets.reserve(cams.size());
    for (const CameraView& c : cams)
        offsets.push_back(pose_offset(reference.pose, c.pose));
    std::vector<std::size_t> order(cams.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return offsets[a] < offsets[b]; });
    return order;
}

std::vector<CameraView> parse_trajectory(const std::string& text, const std::string& source)
{
    std::vector<CameraView> cams;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const auto tok = io::split_tokens(line);
        if (tok.empty())
            continue;
        const std::string ctx = source + ":" + std::to_string(line_no);
        if (tok.size() != 18)
            throw Error(ErrorCategory::InvalidInput, ctx + ": expected 18 values per view, got " + std::to_string(tok.size()));
        CameraView cam;
        cam.fx = io::parse_double(tok[0], ctx);
        cam.fy = io::parse_double(tok[1], ctx);
        cam.cx = io::parse_double(tok[2], ctx);
        cam.cy = io::parse_double(tok[3], ctx);
        cam.width = static_cast<int>(io::parse_long(tok[4], ctx));
        cam.height = static_cast<int>(io::parse_long(tok[5], ctx));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                cam.pose.rotation(r, c) = io::parse_double(tok[6 + 3 * r + c], ctx);
        for (int i = 0; i < 3; ++i)
            cam.pose.translation(i) = io::parse_double(tok[15 + i], ctx);
        try {
            cam.validate();
        } catch (const Error& e) {
            throw Error(ErrorCategory::InvalidInput, ctx + ": " + e.what());
        }
        cams.push_back(cam);
    }
    return cams;
}

std::string format_trajectory(const std::vector<CameraView>& cams)
{
    std::string out;
    for (const CameraView& cam : cams) {
        std::vector<std::string> f;
        f.push_back(io::format_double(cam.fx));
        f.push_back(io::format_double(cam.fy));
        f.push_back(io::format_double(cam.cx));
        f.push_back(io::format_double(cam.cy));
        f.push_back(std::to_string(cam.width));
        f.push_back(std::to_string(cam.height));
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                f.push_back(io::format_double(cam.pose.rotation(r, c)));
        for (int i = 0; i < 3; ++i)
            f.push_back(io::format_double(cam.pose.translation(i)));
        for (std::size_t i = 0; i < f.size(); ++i) {
            out += f[i];
            out += i + 1 == f.size() ? '\n' : ' ';
        }
    }
    return out;
}

std::vector<CameraView> read_trajectory(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw Error(ErrorCategory::Io, "trajectory file not found: '" + path.string() + "'");
    return parse_trajectory(io::read_text_file(path), path.string());
}

void write_trajectory(const std::filesystem::path& path, const std::vector<CameraView>& cams)
{
    io::write_text_file(path, format_trajectory(cams));
}

} // namespace iags::geometry
