// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/geometry/handles.hpp"
#include "iags/predictor/losses.hpp"
#include "iags/predictor/predictor.hpp"
#include "iags/predictor/residual.hpp"
#include "iags/refine/change_map.hpp"
#include "iags/refine/refiner.hpp"
#include "iags/splat/density.hpp"
#include "iags/splat/rasterizer.hpp"
#include "iags/train/gs_loss.hpp"
#include "iags/train/optimizer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iags::train {

struct TrainConfig {
    long total_iterations = 15000;
    long refine_interval = 2000;
    double s_start = 0.6;
    double s_end = 0.3;
    double tau_low_start = 0.7;
    double tau_low_end = 0.85;
    double tau_high = 0.95;
    FieldLearningRates rates;
    double predictor_rate = 1e-2;
    predictor::MaskLossWeights mask_weights;
    GsLossWeights loss_weights;
    refine::TierWeights tiers;
    long denoise_steps = 50;
    std::string text_prompt;
    double depth_scale = 0.001;
    // Density control runs every `densify_interval` iterations in [densify_from, densify_until).
    long densify_from = 500;
    long densify_until = 7500;
    long densify_interval = 100;
    splat::DensityConfig density;
    splat::RasterSettings raster;
    /// Disabling gives the ablation: empty M^mlp, no predictor training or reset.
    bool inconsistency_aware = true;
    long log_interval = 100;
    std::uint64_t seed = 0;

    /// Throws Config on out-of-range values.
    void validate() const;
};

struct MetricRecord {
    long iteration = 0;
    /// "train", "refine" or "final".
    std::string event;
    GsLossTerms loss;
    predictor::MaskLossTerms mask;
    std::size_t splats = 0;
    /// Present when evaluation targets were supplied (refinement rounds and the final record).
    std::optional<double> masked_psnr;
    std::optional<double> mask_iou;
};

/// "iteration,event,l2,l1,pearson,gs_total,mask_supervision,mask_prior,mask_discard,mask_total,splats,masked_psnr,mask_iou"
std::string format_metric_log(const std::vector<MetricRecord>& log);

struct TrainState {
    splat::SplatField field;
    predictor::PredictorParams phi;
    std::vector<geometry::CameraView> cams;
    /// I^init: the coarse initial video.
    std::vector<ColorImage> initial;
    /// Current refined video; starts as a copy of `initial`.
    std::vector<ColorImage> video;
    std::vector<Mask> refine_masks;
    std::vector<Mask> occlusion_masks;
    long iteration = 0;
    long rounds = 0;
    /// M^mlp of every view at the latest refinement round (before the video was replaced).
    std::vector<Mask> last_mlp;
    std::vector<MetricRecord> log;

    /// Initial-state constructor; checks every per-view list has one entry per camera of equal size.
    static TrainState create(splat::SplatField field, std::vector<geometry::CameraView> cams,
                             std::vector<ColorImage> initial, std::vector<Mask> refine_masks,
                             std::vector<Mask> occlusion_masks, std::uint64_t seed);
};

/// Optional ground truth for logging masked-region quality.
struct EvalTargets {
    std::vector<ColorImage> frames;
    /// Per view; pixels whose reconstruction error is tracked (e.g. corrupted regions).
    std::vector<Mask> regions;
};

struct RoundInfo {
    long round = 0;
    long iteration = 0;
    double noise_level = 0.0;
    double tau_low = 0.0;
    std::vector<Mask> mlp;
    std::vector<ScalarMap> change_maps;
    predictor::PredictorParams phi_before;
    predictor::PredictorParams phi_after;
};

class TrainObserver {
public:
    virtual ~TrainObserver() = default;
    virtual void on_round(const RoundInfo&, const TrainState&) {}
};

struct TrainHandles {
    refine::Refiner& refiner;
    geometry::DepthEstimator& depth_estimator;
    const EvalTargets* eval = nullptr;
    TrainObserver* observer = nullptr;
    /// When set, field + predictor + metric log are written here after every round and on refiner failure.
    std::filesystem::path checkpoint_dir;
};

/// Seed stream of the predictor initialization used at round r (r = 0 before the first round).
std::uint64_t predictor_seed(std::uint64_t seed, long round);

/// Runs the optimization to `config.total_iterations` and returns the final state.
TrainState train(TrainState state, const TrainConfig& config, TrainHandles handles);

/// Scene extent used to scale position learning rates: 1.1 x the largest camera-center distance from their centroid.
double camera_extent(const std::vector<geometry::CameraView>& cams);

void write_checkpoint(const std::filesystem::path& dir, const TrainState& state);

} // namespace iags::train
