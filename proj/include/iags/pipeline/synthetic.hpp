// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"
#include "iags/geometry/camera.hpp"
#include "iags/pipeline/config.hpp"
#include "iags/splat/rasterizer.hpp"
#include "iags/splat/splat.hpp"

#include <cstdint>
#include <vector>

namespace iags::pipeline {

/// Toy scene with known geometry: a back wall, a floor and a partial front panel built from flat
/// colored splats, seen along a look-at arc that starts at the reference view (view 0, identity pose).
struct SyntheticScene {
    splat::SplatField field;
    std::vector<geometry::CameraView> cams;
    /// Clean renders, quantized to 8 bits.
    std::vector<ColorImage> gt_frames;
    /// Surface depth (alpha-normalized); sentinel where coverage is below 0.5.
    std::vector<ScalarMap> gt_depth;
    /// Dataset frames: gt_frames with corrupted rectangles.
    std::vector<ColorImage> frames;
    std::vector<CorruptRegion> regions;

    /// Per-view masks of the corrupted rectangles.
    std::vector<Mask> region_masks() const;
};

/// Rectangles actually used for `spec`: explicit regions, or one centered rectangle of
/// `corrupt_fraction` of the frame per corrupted view. Throws Config when a rectangle leaves the
/// frame, names a missing view, or every view would be corrupted.
std::vector<CorruptRegion> resolve_regions(const SynthSpec& spec);

/// Seeded and deterministic.
SyntheticScene generate_synthetic(const SynthSpec& spec, std::uint64_t seed, const splat::RasterSettings& raster = {});

std::vector<geometry::CameraView> arc_trajectory(const SynthSpec& spec);

/// Alpha-normalized depth of a render: (depth - T * background_depth) / alpha where alpha >= min_alpha.
ScalarMap surface_depth(const splat::RenderOutput& render, double min_alpha = 0.5);

/// Rounds every value to the nearest multiple of 1/255 after clamping to [0,1].
ColorImage quantize8(const ColorImage& image);

Mask region_mask(int width, int height, const std::vector<CorruptRegion>& regions, std::size_t view);

} // namespace iags::pipeline
