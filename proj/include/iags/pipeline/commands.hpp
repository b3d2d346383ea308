// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/geometry/handles.hpp"
#include "iags/pipeline/config.hpp"
#include "iags/pipeline/dataset.hpp"
#include "iags/train/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iags::pipeline {

// In-process stages; the cmd_* wrappers add file I/O under config.output_dir.

/// Warp-and-inpaint initialization from the reference view, plus the seed splat field and I^init
/// (the dataset frames).
InitOutputs initialize(const PipelineConfig& config, const Dataset& dataset, geometry::ImageInpainter& inpainter,
                       geometry::DepthEstimator& depth_estimator);

train::TrainState make_train_state(const PipelineConfig& config, const InitOutputs& init, const Dataset& dataset);

struct EvalReport {
    std::vector<double> view_pearson;
    std::vector<bool> zero_variance;
    double mean_pearson = 0.0;
    std::optional<double> psnr;
    std::optional<double> masked_psnr;
    std::optional<double> mask_iou;
};

/// Depth Pearson of alpha-normalized rendered depth vs ground-truth depth (pixels where both are finite) per view, PSNR
/// against ground-truth frames, masked PSNR over the corruption regions, and IoU of `mlp` against them.
EvalReport evaluate(const splat::SplatField& field, const Dataset& dataset, const std::vector<Mask>* mlp = nullptr,
                    const splat::RasterSettings& raster = {});

std::string format_report(const EvalReport& report);

void cmd_synth(const PipelineConfig& config);
void cmd_init(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
EvalReport cmd_eval(const PipelineConfig& config);
void cmd_render(const PipelineConfig& config);

} // namespace iags::pipeline
