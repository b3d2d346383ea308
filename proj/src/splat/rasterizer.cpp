// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/splat/rasterizer.hpp"

#include "iags/common/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace iags::splat {

namespace {

// Lexicographic order on parameters, used only to break exact depth ties so that
// the result does not depend on input order.
bool params_less(const Splat& a, const Splat& b)
{
    const auto flat = [](const Splat& s) {
        std::array<double, 14> v{};
        for (int i = 0; i < 3; ++i) {
            v[i] = s.mean(i);
            v[3 + i] = s.log_scale(i);
            v[10 + i] = s.color(i);
        }
        for (int i = 0; i < 4; ++i)
            v[6 + i] = s.quat(i);
        v[13] = s.opacity_logit;
        return v;
    };
    return flat(a) < flat(b);
}

struct Packed {
    double mx, my;
    double ca, cb, cc; // conic (a, b; b, c)
    double opacity;
    double r, g, b;
    double depth;
    int x_min, x_max, y_min, y_max;
    std::int32_t index;
};

} // namespace

RenderOutput rasterize(const SplatField& field, const geometry::CameraView& cam, const RasterSettings& settings)
{
    cam.validate();
    if (settings.tile_size < 1)
        throw Error(ErrorCategory::InvalidInput, "tile size must be positive");

    RenderOutput out;
    out.width = cam.width;
    out.height = cam.height;
    out.settings = settings;
    out.background = field.background;
    out.field_size = field.size();
    out.color = make_color(cam.width, cam.height);
    out.depth = make_scalar(cam.width, cam.height);
    out.alpha = make_scalar(cam.width, cam.height);
    out.transmittance = make_scalar(cam.width, cam.height);

    out.projected.resize(field.size());
    std::vector<std::int32_t> order;
    order.reserve(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        out.projected[i] = project_splat(field.splats[i], cam, settings);
        if (out.projected[i] && out.projected[i]->x_max >= out.projected[i]->x_min)
            order.push_back(static_cast<std::int32_t>(i));
    }
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        const double da = out.projected[a]->depth, db = out.projected[b]->depth;
        if (da != db)
            return da < db;
        return params_less(field.splats[a], field.splats[b]);
    });

    std::vector<Packed> packed;
    packed.reserve(order.size());
    for (std::int32_t i : order) {
        const ProjectedSplat& p = *out.projected[i];
        const Eigen::Vector3d& c = field.splats[i].color;
        packed.push_back({p.mean2d.x(), p.mean2d.y(), p.conic(0, 0), p.conic(0, 1), p.conic(1, 1), p.opacity, c.x(), c.y(),
                          c.z(), p.depth, p.x_min, p.x_max, p.y_min, p.y_max, i});
    }

    const int ts = settings.tile_size;
    const int tiles_x = (cam.width + ts - 1) / ts;
    const int tiles_y = (cam.height + ts - 1) / ts;
    std::vector<std::vector<std::int32_t>> tile_lists(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (std::size_t k = 0; k < packed.size(); ++k) {
        const Packed& p = packed[k];
        for (int ty = p.y_min / ts; ty <= p.y_max / ts; ++ty)
            for (int tx = p.x_min / ts; tx <= p.x_max / ts; ++tx)
                tile_lists[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(static_cast<std::int32_t>(k));
    }

    // Pixels are visited tile by tile; contributions are appended in that order and
    // located through per-pixel [begin, end) ranges.
    const std::size_t npix = out.color.pixel_count();
    std::vector<std::size_t> begin(npix, 0), end(npix, 0);
    out.contributions.reserve(npix * 8);
    const double bg_r = field.background.x(), bg_g = field.background.y(), bg_b = field.background.z();

    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const auto& list = tile_lists[static_cast<std::size_t>(ty) * tiles_x + tx];
            const int y_end = std::min(cam.height, (ty + 1) * ts);
            const int x_end = std::min(cam.width, (tx + 1) * ts);
            for (int y = ty * ts; y < y_end; ++y) {
                for (int x = tx * ts; x < x_end; ++x) {
                    const std::size_t px = static_cast<std::size_t>(y) * cam.width + x;
                    begin[px] = out.contributions.size();
                    double t = 1.0;
                    double acc_alpha = 0.0;
                    double cr = 0.0, cg = 0.0, cb = 0.0, cd = 0.0;
                    for (std::int32_t k : list) {
                        const Packed& p = packed[static_cast<std::size_t>(k)];
                        if (x < p.x_min || x > p.x_max || y < p.y_min || y > p.y_max)
                            continue;
                        const double dx = x - p.mx, dy = y - p.my;
                        const double q = p.ca * dx * dx + 2.0 * p.cb * dx * dy + p.cc * dy * dy;
                        double a = p.opacity * std::exp(-0.5 * q);
                        if (a < settings.alpha_min)
                            continue;
                        bool clamped = false;
                        if (a > settings.alpha_max) {
                            a = settings.alpha_max;
                            clamped = true;
                        }
                        if (settings.min_transmittance > 0.0 && t * (1.0 - a) < settings.min_transmittance)
                            break;
                        const double w = a * t;
                        cr += w * p.r;
                        cg += w * p.g;
                        cb += w * p.b;
                        cd += w * p.depth;
                        acc_alpha += w;
                        t *= 1.0 - a;
                        out.contributions.push_back({p.index, a, clamped});
                    }
                    end[px] = out.contributions.size();
                    out.color[px * 3 + 0] = cr + t * bg_r;
                    out.color[px * 3 + 1] = cg + t * bg_g;
                    out.color[px * 3 + 2] = cb + t * bg_b;
                    out.depth[px] = cd + t * settings.background_depth;
                    out.alpha[px] = acc_alpha;
                    out.transmittance[px] = t;
                }
            }
        }
    }

    // Re-pack contributions in row-major pixel order so ranges are contiguous offsets.
    std::vector<Contribution> ordered;
    ordered.reserve(out.contributions.size());
    out.pixel_offsets.assign(npix + 1, 0);
    for (std::size_t px = 0; px < npix; ++px) {
        out.pixel_offsets[px] = ordered.size();
        ordered.insert(ordered.end(), out.contributions.begin() + static_cast<std::ptrdiff_t>(begin[px]),
                       out.contributions.begin() + static_cast<std::ptrdiff_t>(end[px]));
    }
    out.pixel_offsets[npix] = ordered.size();
    out.contributions = std::move(ordered);
    return out;
}

} // namespace iags::splat
