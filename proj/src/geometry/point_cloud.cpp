// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/geometry/point_cloud.hpp"

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"

#include <cmath>
#include <sstream>

namespace iags::geometry {

UnprojectResult unproject(const ColorImage& image, const ScalarMap& depth, const CameraView& cam, PointOrigin origin,
                          const Mask* only)
{
    cam.validate();
    if (!image.same_shape(cam.width, cam.height) || !depth.same_shape(cam.width, cam.height) ||
        image.channels() != 3 || depth.channels() != 1)
        throw Error(ErrorCategory::InvalidInput, "unproject: image/depth dimensions do not match the camera");
    if (only && !only->same_shape(cam.width, cam.height))
        throw Error(ErrorCategory::InvalidInput, "unproject: selection mask dimensions do not match the camera");

    UnprojectResult result;
    result.cloud.points.reserve(depth.pixel_count());
    for (int v = 0; v < cam.height; ++v) {
        for (int u = 0; u < cam.width; ++u) {
            if (only && !(*only)(u, v))
                continue;
            const double d = depth(u, v);
            if (!std::isfinite(d) || d <= 0.0) {
                ++result.skipped;
                continue;
            }
            Point p;
            p.position = cam.pose.inverse_apply(cam.unproject_camera(u, v, d));
            p.color = {image(u, v, 0), image(u, v, 1), image(u, v, 2)};
            p.origin = origin;
            result.cloud.points.push_back(p);
        }
    }
    return result;
}

PosedRender render_points(const PointCloud& cloud, const CameraView& cam)
{
    PosedRender out;
    out.color = make_color(cam.width, cam.height);
    out.depth = make_scalar(cam.width, cam.height, kDepthSentinel);
    out.pix_mask = make_mask(cam.width, cam.height, 1);
    out.winner.assign(out.depth.pixel_count(), -1);

    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
        const Point& p = cloud.points[i];
        const Eigen::Vector3d c = cam.pose.apply(p.position);
        int u = 0, v = 0;
        if (!project_to_pixel(cam, c, u, v))
            continue;
        // Strict comparison keeps the lower index on exact ties.
        if (c.z() < out.depth(u, v)) {
            out.depth(u, v) = c.z();
            out.winner[out.depth.index(u, v)] = static_cast<long>(i);
        }
    }
    for (std::size_t px = 0; px < out.winner.size(); ++px) {
        const long w = out.winner[px];
        if (w < 0)
            continue;
        out.pix_mask[px] = 0;
        for (int ch = 0; ch < 3; ++ch)
            out.color[px * 3 + ch] = cloud.points[static_cast<std::size_t>(w)].color(ch);
    }
    return out;
}

void write_point_cloud(const std::filesystem::path& path, const PointCloud& cloud)
{
    std::string out;
    out.reserve(cloud.size() * 96);
    for (const Point& p : cloud.points) {
        for (int i = 0; i < 3; ++i) {
            out += io::format_double(p.position(i));
            out += ' ';
        }
        for (int i = 0; i < 3; ++i) {
            out += io::format_double(p.color(i));
            out += ' ';
        }
        out += p.origin == PointOrigin::Reference ? "reference\n" : "inpainted\n";
    }
    io::write_text_file(path, out);
}

PointCloud read_point_cloud(const std::filesystem::path& path)
{
    const std::string text = io::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    PointCloud cloud;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = io::split_tokens(line);
        if (tok.empty())
            continue;
        const std::string ctx = path.string() + ":" + std::to_string(line_no);
        if (tok.size() != 7)
            throw Error(ErrorCategory::InvalidInput, ctx + ": expected 'x y z r g b tag'");
        Point p;
        for (int i = 0; i < 3; ++i)
            p.position(i) = io::parse_double(tok[i], ctx);
        for (int i = 0; i < 3; ++i)
            p.color(i) = io::parse_double(tok[3 + i], ctx);
        if (tok[6] == "reference")
            p.origin = PointOrigin::Reference;
        else if (tok[6] == "inpainted")
            p.origin = PointOrigin::Inpainted;
        else
            throw Error(ErrorCategory::InvalidInput, ctx + ": unknown origin tag '" + tok[6] + "'");
        if (!p.position.allFinite() || (p.color.array() < 0.0).any() || (p.color.array() > 1.0).any())
            throw Error(ErrorCategory::InvalidInput, ctx + ": point must be finite with colors in [0,1]");
        cloud.points.push_back(p);
    }
    return cloud;
}

} // namespace iags::geometry
