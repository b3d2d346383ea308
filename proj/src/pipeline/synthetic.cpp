// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/pipeline/synthetic.hpp"

#include "iags/common/error.hpp"
#include "iags/common/seed.hpp"

#include <fmt/format.h>

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

namespace iags::pipeline {

namespace {

// Scene layout in the reference camera frame (+z forward, +y down).
constexpr double kWallZ = 5.0;
constexpr double kFloorY = 1.2;
constexpr double kMinX = -3.5, kMaxX = 6.5;
constexpr double kTopY = -3.0;
constexpr double kFloorNear = 1.6;
const Eigen::Vector3d kTarget(0.0, 0.0, 4.0);

struct Plane {
    // Splat centers at origin + a * u_axis + b * v_axis for (a, b) in [0, u_len] x [0, v_len].
    Eigen::Vector3d origin;
    Eigen::Vector3d u_axis, v_axis;
    double u_len, v_len;
    int normal_axis;
    Eigen::Vector3d base_color;
};

void fill_plane(const Plane& p, int count, std::mt19937_64& rng, splat::SplatField& field)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int nu = std::max(1, static_cast<int>(std::lround(std::sqrt(count * p.u_len / p.v_len))));
    const int nv = std::max(1, count / nu);
    const double du = p.u_len / nu;
    const double dv = p.v_len / nv;
    const double spacing = std::sqrt(du * dv);

    const auto emit = [&](double a, double b) {
        splat::Splat s;
        s.mean = p.origin + a * p.u_axis + b * p.v_axis;
        const double in_plane = std::log(0.75 * spacing * (0.85 + 0.3 * unit(rng)));
        s.log_scale = Eigen::Vector3d::Constant(in_plane);
        s.log_scale[p.normal_axis] = std::log(0.02);
        Eigen::Vector3d axis = Eigen::Vector3d::Zero();
        axis[p.normal_axis] = 1.0;
        const Eigen::Quaterniond q(Eigen::AngleAxisd(std::numbers::pi * unit(rng), axis));
        s.quat = Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
        s.opacity_logit = 4.0;
        // Slow drift across the plane plus per-blob jitter gives texture without aliasing.
        const double t = a / p.u_len;
        for (int c = 0; c < 3; ++c) {
            const double drift = 0.25 * std::sin(2.0 * std::numbers::pi * (t + 0.33 * c));
            s.color[c] = std::clamp(p.base_color[c] + drift + 0.3 * (unit(rng) - 0.5), 0.03, 0.97);
        }
        field.splats.push_back(s);
    };

    for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nu; ++i)
            emit((i + 0.5 + 0.3 * (unit(rng) - 0.5)) * du, (j + 0.5 + 0.3 * (unit(rng) - 0.5)) * dv);
    for (int k = nu * nv; k < count; ++k)
        emit(unit(rng) * p.u_len, unit(rng) * p.v_len);
}

} // namespace

std::vector<geometry::CameraView> arc_trajectory(const SynthSpec& spec)
{
    std::vector<geometry::CameraView> cams;
    const double span = spec.arc_degrees * std::numbers::pi / 180.0;
    for (int i = 0; i < spec.views; ++i) {
        const double theta = spec.views > 1 ? span * i / (spec.views - 1) : 0.0;
        // Circle of the given radius through the origin; every view looks at the scene center.
        const Eigen::Vector3d pivot(0.0, 0.0, spec.arc_radius);
        const Eigen::Vector3d eye = pivot + spec.arc_radius * Eigen::Vector3d(-std::sin(theta), 0.0, -std::cos(theta));
        geometry::CameraView cam;
        cam.fx = cam.fy = spec.focal;
        cam.cx = 0.5 * (spec.width - 1);
        cam.cy = 0.5 * (spec.height - 1);
        cam.width = spec.width;
        cam.height = spec.height;
        cam.pose = geometry::look_at(eye, kTarget, Eigen::Vector3d(0.0, 1.0, 0.0));
        cams.push_back(cam);
    }
    return cams;
}

std::vector<CorruptRegion> resolve_regions(const SynthSpec& spec)
{
    std::vector<CorruptRegion> regions = spec.regions;
    if (regions.empty() && spec.corrupt_fraction > 0.0) {
        const double area = spec.corrupt_fraction * spec.width * spec.height;
        const int side_x = std::clamp(static_cast<int>(std::lround(std::sqrt(area))), 1, spec.width);
        const int side_y = std::clamp(static_cast<int>(std::lround(area / side_x)), 1, spec.height);
        const int x0 = (spec.width - side_x) / 2;
        const int y0 = (spec.height - side_y) / 2;
        for (std::size_t v : spec.corrupt_views)
            regions.push_back({v, {x0, y0, x0 + side_x, y0 + side_y}});
    }
    std::set<std::size_t> views;
    for (const CorruptRegion& r : regions) {
        if (r.view >= static_cast<std::size_t>(spec.views))
            throw Error(ErrorCategory::Config, fmt::format("corruption names view {} of {}", r.view, spec.views));
        if (r.rect.x0 < 0 || r.rect.y0 < 0 || r.rect.x1 > spec.width || r.rect.y1 > spec.height ||
            r.rect.x0 >= r.rect.x1 || r.rect.y0 >= r.rect.y1)
            throw Error(ErrorCategory::Config,
                        fmt::format("corruption rectangle {},{},{},{} of view {} is empty or outside the {}x{} frame",
                                    r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1, r.view, spec.width, spec.height));
        views.insert(r.view);
    }
    if (views.size() >= static_cast<std::size_t>(spec.views))
        throw Error(ErrorCategory::Config, "every view is corrupted; at least one must stay clean");
    return regions;
}

ScalarMap surface_depth(const splat::RenderOutput& render, double min_alpha)
{
    ScalarMap d = make_scalar(render.width, render.height, kDepthSentinel);
    for (std::size_t p = 0; p < d.size(); ++p) {
        const double a = render.alpha[p];
        if (a >= min_alpha)
            d[p] = (render.depth[p] - render.transmittance[p] * render.settings.background_depth) / a;
    }
    return d;
}

ColorImage quantize8(const ColorImage& image)
{
    ColorImage out = image;
    for (double& v : out.storage())
        v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
    return out;
}

Mask region_mask(int width, int height, const std::vector<CorruptRegion>& regions, std::size_t view)
{
    Mask m = make_mask(width, height);
    for (const CorruptRegion& r : regions)
        if (r.view == view)
            for (int y = std::max(0, r.rect.y0); y < std::min(height, r.rect.y1); ++y)
                for (int x = std::max(0, r.rect.x0); x < std::min(width, r.rect.x1); ++x)
                    m(x, y) = 1;
    return m;
}

std::vector<Mask> SyntheticScene::region_masks() const
{
    std::vector<Mask> out;
    for (std::size_t v = 0; v < cams.size(); ++v)
        out.push_back(region_mask(cams[v].width, cams[v].height, regions, v));
    return out;
}

SyntheticScene generate_synthetic(const SynthSpec& spec, std::uint64_t seed, const splat::RasterSettings& raster)
{
    if (spec.splats < 3 || spec.views < 2)
        throw Error(ErrorCategory::Config, "synthetic scene needs at least 3 splats and 2 views");
    SyntheticScene scene;
    scene.regions = resolve_regions(spec);
    scene.cams = arc_trajectory(spec);

    std::mt19937_64 rng(derive_seed(seed, 1));
    const int wall = spec.splats / 2;
    const int panel = std::max(1, spec.splats / 10);
    const int floor = spec.splats - wall - panel;
    const Plane wall_plane{{kMinX, kTopY, kWallZ}, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(),
                           kMaxX - kMinX, kFloorY - kTopY, 2, {0.45, 0.55, 0.7}};
    const Plane floor_plane{{kMinX, kFloorY, kFloorNear}, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitZ(),
                            kMaxX - kMinX, kWallZ - kFloorNear, 1, {0.6, 0.45, 0.3}};
    const Plane panel_plane{{-1.4, -0.9, 3.0}, Eigen::Vector3d::UnitX(), Eigen::Vector3d::UnitY(), 1.6, 1.5, 2,
                            {0.75, 0.3, 0.25}};
    fill_plane(wall_plane, wall, rng, scene.field);
    fill_plane(floor_plane, floor, rng, scene.field);
    fill_plane(panel_plane, panel, rng, scene.field);
    scene.field.background = Eigen::Vector3d(0.1, 0.1, 0.1);

    for (const auto& cam : scene.cams) {
        const splat::RenderOutput r = splat::rasterize(scene.field, cam, raster);
        scene.gt_frames.push_back(quantize8(r.color));
        scene.gt_depth.push_back(surface_depth(r));
    }

    scene.frames = scene.gt_frames;
    std::mt19937_64 crng(derive_seed(seed, 2));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const CorruptRegion& reg : scene.regions) {
        ColorImage& f = scene.frames[reg.view];
        const Rect& r = reg.rect;
        if (spec.corrupt_mode == CorruptionMode::Recolor) {
            // Saturated blob with a soft stripe pattern: clearly inconsistent with every other view.
            const Eigen::Vector3d base(0.2 + 0.6 * unit(crng), 0.9 * unit(crng), 0.2 + 0.6 * unit(crng));
            const double phase = unit(crng) * 2.0 * std::numbers::pi;
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x)
                    for (int c = 0; c < 3; ++c)
                        f(x, y, c) = std::clamp(base[c] + 0.15 * std::sin(0.8 * (x + y) + phase + c), 0.0, 1.0);
        } else {
            // Permute 4x4 blocks inside the rectangle; edge blocks may be partial and stay put.
            constexpr int kBlock = 4;
            const int bx = (r.x1 - r.x0) / kBlock;
            const int by = (r.y1 - r.y0) / kBlock;
            std::vector<int> order(static_cast<std::size_t>(bx * by));
            for (std::size_t i = 0; i < order.size(); ++i)
                order[i] = static_cast<int>(i);
            std::shuffle(order.begin(), order.end(), crng);
            const ColorImage src = f;
            for (int b = 0; b < bx * by; ++b) {
                const int sx = r.x0 + (order[b] % bx) * kBlock, sy = r.y0 + (order[b] / bx) * kBlock;
                const int dx = r.x0 + (b % bx) * kBlock, dy = r.y0 + (b / bx) * kBlock;
                for (int y = 0; y < kBlock; ++y)
                    for (int x = 0; x < kBlock; ++x)
                        for (int c = 0; c < 3; ++c)
                            f(dx + x, dy + y, c) = src(sx + x, sy + y, c);
            }
        }
        f = quantize8(f);
    }
    return scene;
}

} // namespace iags::pipeline
