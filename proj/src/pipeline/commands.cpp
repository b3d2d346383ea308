// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/pipeline/commands.hpp"

#include "iags/common/error.hpp"
#include "iags/common/metrics.hpp"
#include "iags/common/png_io.hpp"
#include "iags/common/seed.hpp"
#include "iags/common/text_io.hpp"
#include "iags/geometry/expansion.hpp"
#include "iags/pipeline/oracles.hpp"
#include "iags/refine/file_exchange.hpp"
#include "iags/refine/oracle.hpp"
#include "iags/splat/checkpoint.hpp"
#include "iags/train/pearson.hpp"

#include <fmt/format.h>

#include <cmath>
#include <memory>

namespace iags::pipeline {

namespace fs = std::filesystem;

namespace {

void require_ground_truth(const Dataset& d, const char* what)
{
    if (!d.has_ground_truth())
        throw Error(ErrorCategory::Precondition, fmt::format("{} needs ground-truth frames and depth in the dataset", what));
}

std::unique_ptr<refine::Refiner> make_refiner(const PipelineConfig& c, const Dataset& d)
{
    if (c.refiner == "exchange")
        return std::make_unique<refine::FileExchangeRefiner>(
            refine::ExchangeOptions{c.exchange_dir, std::chrono::milliseconds(c.refiner_timeout_ms)});
    require_ground_truth(d, "the oracle refiner");
    return std::make_unique<refine::OracleRefiner>(d.gt_frames, derive_seed(c.seed, 3), c.oracle_noise);
}

std::unique_ptr<geometry::DepthEstimator> make_depth_estimator(const PipelineConfig& c, const Dataset& d)
{
    require_ground_truth(d, "the oracle depth estimator");
    return std::make_unique<OracleDepthEstimator>(d.gt_depth, c.depth_noise, derive_seed(c.seed, 4));
}

} // namespace

InitOutputs initialize(const PipelineConfig& config, const Dataset& dataset, geometry::ImageInpainter& inpainter,
                       geometry::DepthEstimator& depth_estimator)
{
    const std::size_t ref = config.reference_view;
    if (ref >= dataset.cams.size())
        throw Error(ErrorCategory::Config, fmt::format("reference_view {} out of {} views", ref, dataset.cams.size()));
    std::vector<std::size_t> aux = config.aux_views;
    if (aux.empty())
        for (std::size_t v = 0; v < dataset.cams.size(); ++v)
            if (v != ref)
                aux.push_back(v);
    for (std::size_t v : aux)
        if (v >= dataset.cams.size() || v == ref)
            throw Error(ErrorCategory::Config, fmt::format("aux view {} is not a valid non-reference view", v));

    const ColorImage& ref_image = dataset.frames[ref];
    const ScalarMap ref_depth = depth_estimator.estimate(ref_image, dataset.cams[ref], ref);
    geometry::ExpansionResult ex = geometry::progressive_view_expansion(
        ref_image, ref_depth, dataset.cams[ref], dataset.cams, aux, inpainter, depth_estimator, config.expansion);

    InitOutputs out;
    out.field = field_from_points(ex.cloud, config.init_splats, config.init_opacity,
                                  dataset.gt_field ? dataset.gt_field->background : Eigen::Vector3d::Zero());
    out.reference_cloud = std::move(ex.reference_cloud);
    out.cloud = std::move(ex.cloud);
    out.initial = dataset.frames;
    out.renders = std::move(ex.renders);
    out.pix_masks = std::move(ex.pix_masks);
    out.occlusion_masks = std::move(ex.occlusion_masks);
    out.refine_masks = std::move(ex.refine_masks);
    return out;
}

train::TrainState make_train_state(const PipelineConfig& config, const InitOutputs& init, const Dataset& dataset)
{
    return train::TrainState::create(init.field, dataset.cams, init.initial, init.refine_masks, init.occlusion_masks,
                                     config.seed);
}

EvalReport evaluate(const splat::SplatField& field, const Dataset& dataset, const std::vector<Mask>* mlp,
                    const splat::RasterSettings& raster)
{
    EvalReport rep;
    std::vector<ColorImage> renders;
    for (std::size_t v = 0; v < dataset.cams.size(); ++v) {
        const splat::RenderOutput r = splat::rasterize(field, dataset.cams[v], raster);
        ColorImage shown = r.color;
        for (double& x : shown.storage())
            x = std::clamp(x, 0.0, 1.0);
        renders.push_back(std::move(shown));
        if (v < dataset.gt_depth.size()) {
            // Same depth definition as the ground truth, without its coverage cut-off.
            const ScalarMap rendered = surface_depth(r, 1e-6);
            std::vector<double> a, b;
            for (std::size_t p = 0; p < rendered.size(); ++p) {
                if (std::isfinite(dataset.gt_depth[v][p]) && std::isfinite(rendered[p])) {
                    a.push_back(dataset.gt_depth[v][p]);
                    b.push_back(rendered[p]);
                }
            }
            const train::PearsonResult pr = a.size() >= 2 ? train::pearson(a, b) : train::PearsonResult{0.0, true};
            rep.view_pearson.push_back(pr.value);
            rep.zero_variance.push_back(pr.zero_variance);
        }
    }
    if (!rep.view_pearson.empty()) {
        double sum = 0.0;
        for (double p : rep.view_pearson)
            sum += p;
        rep.mean_pearson = sum / static_cast<double>(rep.view_pearson.size());
    }
    if (dataset.gt_frames.size() == renders.size()) {
        ErrorSum total;
        for (std::size_t v = 0; v < renders.size(); ++v) {
            const ErrorSum e = squared_error(renders[v], dataset.gt_frames[v]);
            total.squared += e.squared;
            total.samples += e.samples;
        }
        rep.psnr = psnr(total);
        if (!dataset.regions.empty()) {
            rep.masked_psnr = masked_psnr(renders, dataset.gt_frames, dataset.region_masks());
            if (mlp && mlp->size() == renders.size())
                rep.mask_iou = mask_iou(*mlp, dataset.region_masks());
        }
    }
    return rep;
}

std::string format_report(const EvalReport& r)
{
    const auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("n/a"); };
    std::string out;
    for (std::size_t v = 0; v < r.view_pearson.size(); ++v)
        out += fmt::format("view {} depth_pearson {}{}\n", v, io::format_double(r.view_pearson[v]),
                           r.zero_variance[v] ? " zero_variance" : "");
    out += fmt::format("mean_depth_pearson {}\n", io::format_double(r.mean_pearson));
    out += fmt::format("psnr {}\n", opt(r.psnr));
    out += fmt::format("masked_psnr {}\n", opt(r.masked_psnr));
    out += fmt::format("mask_iou {}\n", opt(r.mask_iou));
    return out;
}

void cmd_synth(const PipelineConfig& config)
{
    const SyntheticScene scene = generate_synthetic(config.synth, config.seed, config.train.raster);
    write_dataset(config.dataset_dir, dataset_from_scene(scene), config.train.depth_scale);
    io::write_text_file(config.dataset_dir / "config.txt", serialize_config(config));
}

void cmd_init(const PipelineConfig& config)
{
    const Dataset dataset = read_dataset(config.dataset_dir, config.train.depth_scale);
    std::unique_ptr<geometry::DepthEstimator> depth = make_depth_estimator(config, dataset);
    std::unique_ptr<refine::Refiner> refiner;
    std::unique_ptr<geometry::ImageInpainter> inpainter;
    if (config.refiner == "exchange") {
        refiner = make_refiner(config, dataset);
        inpainter = std::make_unique<RefinerInpainter>(*refiner, config.train.text_prompt);
    } else {
        require_ground_truth(dataset, "the oracle inpainter");
        inpainter = std::make_unique<OracleInpainter>(dataset.gt_frames);
    }
    const InitOutputs init = initialize(config, dataset, *inpainter, *depth);
    write_init(config.output_dir / "init", init, config.train.depth_scale);
}

void cmd_train(const PipelineConfig& config)
{
    const Dataset dataset = read_dataset(config.dataset_dir, config.train.depth_scale);
    const InitOutputs init = read_init(config.output_dir / "init", dataset.cams.size());
    std::unique_ptr<refine::Refiner> refiner = make_refiner(config, dataset);
    std::unique_ptr<geometry::DepthEstimator> depth = make_depth_estimator(config, dataset);

    train::EvalTargets targets;
    const bool with_targets = dataset.has_ground_truth() && !dataset.regions.empty();
    if (with_targets) {
        targets.frames = dataset.gt_frames;
        targets.regions = dataset.region_masks();
    }
    const fs::path dir = config.output_dir / "train";
    train::TrainHandles handles{*refiner, *depth, with_targets ? &targets : nullptr, nullptr, dir / "checkpoint"};
    const train::TrainState state = train::train(make_train_state(config, init, dataset), config.train, handles);

    train::write_checkpoint(dir, state);
    fs::create_directories(dir / "renders");
    fs::create_directories(dir / "masks");
    for (std::size_t v = 0; v < state.cams.size(); ++v) {
        const splat::RenderOutput r = splat::rasterize(state.field, state.cams[v], config.train.raster);
        io::write_color_png(dir / "renders" / frame_file("frame", v), r.color);
        io::write_depth_png(dir / "renders" / frame_file("depth", v), r.depth, config.train.depth_scale);
    }
    for (std::size_t v = 0; v < state.last_mlp.size(); ++v)
        io::write_mask_png(dir / "masks" / frame_file("mlp", v), state.last_mlp[v]);
}

EvalReport cmd_eval(const PipelineConfig& config)
{
    const Dataset dataset = read_dataset(config.dataset_dir, config.train.depth_scale);
    const fs::path train_dir = config.output_dir / "train";
    if (!fs::exists(train_dir / "field.txt"))
        throw Error(ErrorCategory::Precondition, fmt::format("no trained field in '{}'; run train first", train_dir.string()));
    const splat::SplatField field = splat::read_field(train_dir / "field.txt");
    std::vector<Mask> mlp;
    for (std::size_t v = 0; v < dataset.cams.size(); ++v) {
        const fs::path p = train_dir / "masks" / frame_file("mlp", v);
        if (!fs::exists(p))
            break;
        mlp.push_back(io::read_mask_png(p));
    }
    const EvalReport report =
        evaluate(field, dataset, mlp.size() == dataset.cams.size() ? &mlp : nullptr, config.train.raster);
    fs::create_directories(config.output_dir / "eval");
    io::write_text_file(config.output_dir / "eval" / "report.txt", format_report(report));
    return report;
}

void cmd_render(const PipelineConfig& config)
{
    const std::vector<geometry::CameraView> cams = geometry::read_trajectory(config.dataset_dir / "trajectory.txt");
    const fs::path train_dir = config.output_dir / "train";
    if (!fs::exists(train_dir / "field.txt"))
        throw Error(ErrorCategory::Precondition, fmt::format("no trained field in '{}'; run train first", train_dir.string()));
    const splat::SplatField field = splat::read_field(train_dir / "field.txt");
    const fs::path dir = config.output_dir / "render";
    fs::create_directories(dir);
    for (std::size_t v = 0; v < cams.size(); ++v) {
        const splat::RenderOutput r = splat::rasterize(field, cams[v], config.train.raster);
        io::write_color_png(dir / frame_file("frame", v), r.color);
        io::write_depth_png(dir / frame_file("depth", v), r.depth, config.train.depth_scale);
    }
}

} // namespace iags::pipeline
