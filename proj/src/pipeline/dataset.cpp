// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/pipeline/dataset.hpp"

#include "iags/common/error.hpp"
#include "iags/common/png_io.hpp"
#include "iags/common/text_io.hpp"
#include "iags/splat/checkpoint.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <tuple>

namespace iags::pipeline {

namespace fs = std::filesystem;

std::string frame_file(const std::string& prefix, std::size_t index) { return fmt::format("{}_{:04d}.png", prefix, index); }

std::vector<Mask> Dataset::region_masks() const
{
    std::vector<Mask> out;
    for (std::size_t v = 0; v < cams.size(); ++v)
        out.push_back(region_mask(cams[v].width, cams[v].height, regions, v));
    return out;
}

Dataset dataset_from_scene(const SyntheticScene& scene)
{
    Dataset d;
    d.cams = scene.cams;
    d.frames = scene.frames;
    d.gt_frames = scene.gt_frames;
    d.gt_depth = scene.gt_depth;
    d.regions = scene.regions;
    d.gt_field = scene.field;
    return d;
}

void write_dataset(const fs::path& dir, const Dataset& d, double depth_scale)
{
    fs::create_directories(dir / "frames");
    geometry::write_trajectory(dir / "trajectory.txt", d.cams);
    for (std::size_t i = 0; i < d.frames.size(); ++i)
        io::write_color_png(dir / "frames" / frame_file("frame", i), d.frames[i]);
    if (d.has_ground_truth()) {
        fs::create_directories(dir / "gt");
        for (std::size_t i = 0; i < d.cams.size(); ++i) {
            io::write_color_png(dir / "gt" / frame_file("frame", i), d.gt_frames[i]);
            io::write_depth_png(dir / "gt" / frame_file("depth", i), d.gt_depth[i], depth_scale);
        }
        std::string regions;
        for (const CorruptRegion& r : d.regions)
            regions += fmt::format("{} {} {} {} {}\n", r.view, r.rect.x0, r.rect.y0, r.rect.x1, r.rect.y1);
        io::write_text_file(dir / "regions.txt", regions);
    }
    if (d.gt_field)
        splat::write_field(dir / "scene.txt", *d.gt_field);
}

Dataset read_dataset(const fs::path& dir, double depth_scale)
{
    Dataset d;
    d.cams = geometry::read_trajectory(dir / "trajectory.txt");
    for (std::size_t i = 0; i < d.cams.size(); ++i) {
        ColorImage f = io::read_color_png(dir / "frames" / frame_file("frame", i));
        if (!f.same_shape(d.cams[i].width, d.cams[i].height))
            throw Error(ErrorCategory::InvalidInput, fmt::format("frame {} does not match its camera size", i));
        d.frames.push_back(std::move(f));
    }
    if (fs::exists(dir / "gt")) {
        for (std::size_t i = 0; i < d.cams.size(); ++i) {
            d.gt_frames.push_back(io::read_color_png(dir / "gt" / frame_file("frame", i)));
            d.gt_depth.push_back(io::read_depth_png(dir / "gt" / frame_file("depth", i), depth_scale));
        }
    }
    if (fs::exists(dir / "regions.txt")) {
        const std::string text = io::read_text_file(dir / "regions.txt");
        const auto tok = io::split_tokens(text);
        if (tok.size() % 5 != 0)
            throw Error(ErrorCategory::InvalidInput, "regions.txt: expected lines 'view x0 y0 x1 y1'");
        for (std::size_t k = 0; k < tok.size(); k += 5) {
            CorruptRegion r;
            r.view = static_cast<std::size_t>(io::parse_long(tok[k], "regions.txt"));
            r.rect = {static_cast<int>(io::parse_long(tok[k + 1], "regions.txt")),
                      static_cast<int>(io::parse_long(tok[k + 2], "regions.txt")),
                      static_cast<int>(io::parse_long(tok[k + 3], "regions.txt")),
                      static_cast<int>(io::parse_long(tok[k + 4], "regions.txt"))};
            d.regions.push_back(r);
        }
    }
    if (fs::exists(dir / "scene.txt"))
        d.gt_field = splat::read_field(dir / "scene.txt");
    return d;
}

void write_init(const fs::path& dir, const InitOutputs& init, double depth_scale)
{
    for (const char* sub : {"initial", "renders", "masks"})
        fs::create_directories(dir / sub);
    geometry::write_point_cloud(dir / "points.txt", init.cloud);
    geometry::write_point_cloud(dir / "reference_points.txt", init.reference_cloud);
    splat::write_field(dir / "field.txt", init.field);
    for (std::size_t i = 0; i < init.initial.size(); ++i)
        io::write_color_png(dir / "initial" / frame_file("frame", i), init.initial[i]);
    for (std::size_t i = 0; i < init.renders.size(); ++i) {
        io::write_color_png(dir / "renders" / frame_file("frame", i), init.renders[i].color);
        io::write_depth_png(dir / "renders" / frame_file("depth", i), init.renders[i].depth, depth_scale);
    }
    for (std::size_t i = 0; i < init.pix_masks.size(); ++i)
        io::write_mask_png(dir / "masks" / frame_file("pix", i), init.pix_masks[i]);
    for (std::size_t i = 0; i < init.occlusion_masks.size(); ++i)
        io::write_mask_png(dir / "masks" / frame_file("occ", i), init.occlusion_masks[i]);
    for (std::size_t i = 0; i < init.refine_masks.size(); ++i)
        io::write_mask_png(dir / "masks" / frame_file("refine", i), init.refine_masks[i]);
}

InitOutputs read_init(const fs::path& dir, std::size_t views)
{
    if (!fs::exists(dir / "field.txt"))
        throw Error(ErrorCategory::Precondition,
                    fmt::format("initialization outputs not found in '{}'; run init first", dir.string()));
    InitOutputs init;
    init.field = splat::read_field(dir / "field.txt");
    for (std::size_t i = 0; i < views; ++i) {
        init.initial.push_back(io::read_color_png(dir / "initial" / frame_file("frame", i)));
        init.occlusion_masks.push_back(io::read_mask_png(dir / "masks" / frame_file("occ", i)));
        init.refine_masks.push_back(io::read_mask_png(dir / "masks" / frame_file("refine", i)));
    }
    return init;
}

splat::SplatField field_from_points(const geometry::PointCloud& cloud, long max_splats, double opacity,
                                    const Eigen::Vector3d& background)
{
    splat::SplatField field;
    field.background = background;
    if (cloud.empty())
        return field;
    Eigen::Vector3d lo = cloud.points[0].position, hi = lo;
    for (const auto& p : cloud.points) {
        lo = lo.cwiseMin(p.position);
        hi = hi.cwiseMax(p.position);
    }
    struct Cell {
        Eigen::Vector3d pos = Eigen::Vector3d::Zero();
        Eigen::Vector3d color = Eigen::Vector3d::Zero();
        long n = 0;
    };
    const double longest = std::max((hi - lo).maxCoeff(), 1e-6);
    // Grow the cell size until the occupied cell count fits the budget.
    for (double cell = longest / 512.0;; cell *= 1.1) {
        std::map<std::tuple<long, long, long>, Cell> cells;
        for (const auto& p : cloud.points) {
            const Eigen::Vector3d q = (p.position - lo) / cell;
            Cell& c = cells[{static_cast<long>(std::floor(q.x())), static_cast<long>(std::floor(q.y())),
                             static_cast<long>(std::floor(q.z()))}];
            c.pos += p.position;
            c.color += p.color;
            ++c.n;
        }
        if (static_cast<long>(cells.size()) > max_splats)
            continue;
        for (const auto& [key, c] : cells) {
            splat::Splat s;
            s.mean = c.pos / static_cast<double>(c.n);
            s.color = c.color / static_cast<double>(c.n);
            s.log_scale = Eigen::Vector3d::Constant(std::log(0.5 * cell));
            s.opacity_logit = splat::logit(opacity);
            field.splats.push_back(s);
        }
        return field;
    }
}

} // namespace iags::pipeline
