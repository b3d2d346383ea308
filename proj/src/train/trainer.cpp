// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/train/trainer.hpp"

#include "iags/common/error.hpp"
#include "iags/common/metrics.hpp"
#include "iags/common/seed.hpp"
#include "iags/common/text_io.hpp"
#include "iags/splat/checkpoint.hpp"
#include "iags/train/schedule.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace iags::train {

namespace fs = std::filesystem;

void TrainConfig::validate() const
{
    const auto fail = [](const std::string& what) { throw Error(ErrorCategory::Config, what); };
    if (total_iterations < 1)
        fail("total_iterations must be >= 1");
    if (refine_interval < 1 || refine_interval > total_iterations)
        fail("refine_interval must lie in [1, total_iterations]");
    if (!(s_end > 0.0 && s_end <= s_start && s_start <= 1.0))
        fail("noise levels must satisfy 0 < s_end <= s_start <= 1");
    if (!(tau_low_start > 0.0 && tau_low_end < 1.0 && tau_low_start < tau_high && tau_low_end < tau_high && tau_high < 1.0))
        fail("quantile levels must satisfy 0 < tau_low < tau_high < 1");
    if (denoise_steps < 1)
        fail("denoise_steps must be >= 1");
    if (densify_interval < 1)
        fail("densify_interval must be >= 1");
    if (log_interval < 1)
        fail("log_interval must be >= 1");
    if (mask_weights.prior < 0.0 || mask_weights.discard < 0.0)
        fail("mask loss weights must be non-negative");
    if (!(depth_scale > 0.0))
        fail("depth_scale must be positive");
}

std::string format_metric_log(const std::vector<MetricRecord>& log)
{
    const auto opt = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("-"); };
    std::string out = "iteration,event,l2,l1,pearson,gs_total,mask_supervision,mask_prior,mask_discard,mask_total,"
                      "splats,masked_psnr,mask_iou\n";
    for (const MetricRecord& r : log) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.iteration, r.event, io::format_double(r.loss.l2),
                           io::format_double(r.loss.l1), io::format_double(r.loss.pearson),
                           io::format_double(r.loss.total), io::format_double(r.mask.supervision),
                           io::format_double(r.mask.prior), io::format_double(r.mask.discard),
                           io::format_double(r.mask.total), r.splats, opt(r.masked_psnr), opt(r.mask_iou));
    }
    return out;
}

std::uint64_t predictor_seed(std::uint64_t seed, long round)
{
    return derive_seed(seed, 0x100 + static_cast<std::uint64_t>(round));
}

TrainState TrainState::create(splat::SplatField field, std::vector<geometry::CameraView> cams,
                              std::vector<ColorImage> initial, std::vector<Mask> refine_masks,
                              std::vector<Mask> occlusion_masks, std::uint64_t seed)
{
    const std::size_t n = cams.size();
    if (n == 0)
        throw Error(ErrorCategory::InvalidInput, "training needs at least one view");
    if (initial.size() != n || refine_masks.size() != n || occlusion_masks.size() != n)
        throw Error(ErrorCategory::InvalidInput,
                    fmt::format("training views disagree: {} cameras, {} frames, {} refine masks, {} occlusion masks", n,
                                initial.size(), refine_masks.size(), occlusion_masks.size()));
    for (std::size_t i = 0; i < n; ++i) {
        const geometry::CameraView& c = cams[i];
        c.validate();
        if (!initial[i].same_shape(c.width, c.height) || initial[i].channels() != 3 ||
            !refine_masks[i].same_shape(c.width, c.height) || !occlusion_masks[i].same_shape(c.width, c.height))
            throw Error(ErrorCategory::InvalidInput, fmt::format("view {}: frame or mask size differs from the camera", i));
    }
    TrainState s;
    s.field = std::move(field);
    s.phi = predictor::init_predictor(predictor::kFeatureChannels, predictor_seed(seed, 0));
    s.cams = std::move(cams);
    s.video = initial;
    s.initial = std::move(initial);
    s.refine_masks = std::move(refine_masks);
    s.occlusion_masks = std::move(occlusion_masks);
    return s;
}

double camera_extent(const std::vector<geometry::CameraView>& cams)
{
    if (cams.empty())
        return 1.0;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& c : cams)
        centroid += c.pose.center();
    centroid /= static_cast<double>(cams.size());
    double r = 0.0;
    for (const auto& c : cams)
        r = std::max(r, (c.pose.center() - centroid).norm());
    return r > 0.0 ? 1.1 * r : 1.0;
}

void write_checkpoint(const fs::path& dir, const TrainState& state)
{
    fs::create_directories(dir);
    splat::write_field(dir / "field.txt", state.field);
    predictor::write_predictor(dir / "predictor.txt", state.phi);
    io::write_text_file(dir / "metrics.csv", format_metric_log(state.log));
}

namespace {

ColorImage clamped(const ColorImage& img)
{
    ColorImage out = img;
    for (double& v : out.storage())
        v = std::clamp(v, 0.0, 1.0);
    return out;
}

struct Trainer {
    TrainState state;
    const TrainConfig& cfg;
    TrainHandles handles;
    FieldOptimizer field_opt;
    PredictorOptimizer phi_opt;
    splat::GradientStats grad_stats;
    std::mt19937_64 density_rng;
    std::vector<ScalarMap> cond_depth;
    double extent;

    Trainer(TrainState s, const TrainConfig& c, TrainHandles h)
        : state(std::move(s)), cfg(c), handles(h), field_opt(c.rates, camera_extent(state.cams), c.total_iterations),
          phi_opt(c.predictor_rate), density_rng(derive_seed(c.seed, 7)), extent(camera_extent(state.cams))
    {
    }

    void estimate_depths()
    {
        cond_depth.clear();
        for (std::size_t v = 0; v < state.cams.size(); ++v) {
            ScalarMap d = handles.depth_estimator.estimate(state.video[v], state.cams[v], v);
            if (!d.same_shape(state.cams[v].width, state.cams[v].height))
                throw Error(ErrorCategory::InvalidInput, fmt::format("depth estimate for view {} has the wrong size", v));
            cond_depth.push_back(std::move(d));
        }
    }

    /// Inlier probabilities of one view under the current head.
    ScalarMap inlier_probability(const ColorImage& render, std::size_t v) const
    {
        return predictor::predict(predictor::compute_features(render, state.initial[v]), state.phi);
    }

    std::vector<ColorImage> render_all(std::vector<splat::RenderOutput>* outputs = nullptr) const
    {
        std::vector<ColorImage> frames;
        for (const auto& cam : state.cams) {
            splat::RenderOutput r = splat::rasterize(state.field, cam, cfg.raster);
            frames.push_back(clamped(r.color));
            if (outputs)
                outputs->push_back(std::move(r));
        }
        return frames;
    }

    void evaluate(MetricRecord& rec, const std::vector<ColorImage>& renders, const std::vector<Mask>* mlp) const
    {
        if (!handles.eval)
            return;
        const EvalTargets& e = *handles.eval;
        if (e.frames.size() == renders.size() && e.regions.size() == renders.size()) {
            rec.masked_psnr = masked_psnr(renders, e.frames, e.regions);
            if (mlp)
                rec.mask_iou = mask_iou(*mlp, e.regions);
        }
    }

    void refinement_round(long completed)
    {
        const std::size_t n = state.cams.size();
        RoundInfo info;
        info.round = state.rounds + 1;
        info.iteration = completed;
        info.noise_level = anneal_noise_level(completed, cfg.total_iterations, cfg.s_start, cfg.s_end);
        info.tau_low = anneal_tau_low(completed, cfg.total_iterations, cfg.tau_low_start, cfg.tau_low_end);

        const std::vector<ColorImage> renders = render_all();
        refine::RefineRequest request;
        request.text_prompt = cfg.text_prompt;
        request.noise_level = info.noise_level;
        request.total_steps = cfg.denoise_steps;
        request.depth_scale = cfg.depth_scale;
        for (std::size_t v = 0; v < n; ++v) {
            Mask mlp = cfg.inconsistency_aware ? predictor::mlp_mask(inlier_probability(renders[v], v))
                                               : make_mask(renders[v].width(), renders[v].height());
            request.change_maps.push_back(refine::change_map(mlp, state.refine_masks[v], info.noise_level, cfg.tiers));
            request.depth_maps.push_back(cond_depth[v]);
            info.mlp.push_back(std::move(mlp));
        }
        request.frames = renders;

        MetricRecord rec;
        rec.iteration = completed;
        rec.event = "refine";
        rec.splats = state.field.size();
        evaluate(rec, renders, &info.mlp);

        refine::RefineResponse response;
        try {
            response = refine::refine(request, handles.refiner);
        } catch (const Error&) {
            state.log.push_back(rec);
            if (!handles.checkpoint_dir.empty())
                write_checkpoint(handles.checkpoint_dir, state);
            throw;
        }

        state.video = std::move(response.frames);
        state.last_mlp = info.mlp;
        info.change_maps = std::move(request.change_maps);
        info.phi_before = state.phi;
        if (cfg.inconsistency_aware) {
            state.phi = predictor::init_predictor(predictor::kFeatureChannels, predictor_seed(cfg.seed, info.round));
            phi_opt.reset();
        }
        info.phi_after = state.phi;
        ++state.rounds;
        estimate_depths();
        state.log.push_back(rec);
        if (handles.observer)
            handles.observer->on_round(info, state);
        if (!handles.checkpoint_dir.empty())
            write_checkpoint(handles.checkpoint_dir, state);
    }

    void iteration(long it)
    {
        const std::size_t v = static_cast<std::size_t>(it) % state.cams.size();
        const geometry::CameraView& cam = state.cams[v];
        const splat::RenderOutput render = splat::rasterize(state.field, cam, cfg.raster);

        MetricRecord rec;
        rec.iteration = it + 1;
        rec.event = "train";
        Mask mlp;
        if (cfg.inconsistency_aware) {
            const ColorImage shown = clamped(render.color);
            const predictor::FeatureMap features = predictor::compute_features(shown, state.initial[v]);
            const ScalarMap h = predictor::predict(features, state.phi);
            const ScalarMap residual = predictor::residual_map(shown, state.initial[v]);
            const predictor::MaskBounds bounds{anneal_tau_low(it, cfg.total_iterations, cfg.tau_low_start, cfg.tau_low_end),
                                               cfg.tau_high};
            const predictor::BoundMaps ul = predictor::compute_bounds(residual, bounds);
            const Mask prior = mask_not(state.occlusion_masks[v]);
            const ScalarMap rn = predictor::normalize_residual(residual);
            rec.mask = predictor::mask_loss(h, ul.upper, ul.lower, prior, rn, cfg.mask_weights);
            const ScalarMap gh = predictor::mask_loss_grad(h, ul.upper, ul.lower, prior, rn, cfg.mask_weights);
            phi_opt.step(state.phi, predictor::predictor_backward(features, h, gh));
            mlp = predictor::mlp_mask(h);
        } else {
            mlp = make_mask(cam.width, cam.height);
        }

        const GsLossResult loss = gs_loss(render.color, state.video[v], state.initial[v], mlp, state.refine_masks[v],
                                          render.depth, cond_depth[v], cfg.loss_weights);
        rec.loss = loss.terms;
        const splat::FieldGrads grads =
            splat::rasterize_backward(state.field, cam, render, {loss.grad_color, loss.grad_depth, {}});
        if (it < cfg.densify_until)
            grad_stats.add(grads, render);
        field_opt.step(state.field, grads, it);

        const long done = it + 1;
        if (done >= cfg.densify_from && done < cfg.densify_until && done % cfg.densify_interval == 0) {
            splat::DensityResult d = splat::density_control(state.field, grad_stats, extent, cfg.density, density_rng);
            field_opt.remap(d.source);
            state.field = std::move(d.field);
            grad_stats.reset();
            grad_stats.resize(state.field.size());
        }
        rec.splats = state.field.size();
        if (done % cfg.log_interval == 0 || done == 1)
            state.log.push_back(rec);
    }

    TrainState run()
    {
        cfg.validate();
        if (state.video.size() != state.initial.size())
            state.video = state.initial;
        estimate_depths();
        grad_stats.resize(state.field.size());
        field_opt.resize(state.field.size());
        for (long it = state.iteration; it < cfg.total_iterations; ++it) {
            iteration(it);
            state.iteration = it + 1;
            if (is_refinement_iteration(state.iteration, cfg.refine_interval))
                refinement_round(state.iteration);
        }
        MetricRecord fin;
        fin.iteration = state.iteration;
        fin.event = "final";
        fin.splats = state.field.size();
        evaluate(fin, render_all(), nullptr);
        state.log.push_back(fin);
        if (!handles.checkpoint_dir.empty())
            write_checkpoint(handles.checkpoint_dir, state);
        return std::move(state);
    }
};

} // namespace

TrainState train(TrainState state, const TrainConfig& config, TrainHandles handles)
{
    Trainer t(std::move(state), config, handles);
    return t.run();
}

} // namespace iags::train
