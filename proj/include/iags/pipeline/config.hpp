// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/geometry/expansion.hpp"
#include "iags/train/trainer.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iags::pipeline {

enum class CorruptionMode { Recolor, Shuffle };

struct Rect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // half-open [x0, x1) x [y0, y1)
    int area() const { return std::max(0, x1 - x0) * std::max(0, y1 - y0); }
    bool operator==(const Rect&) const = default;
};

struct CorruptRegion {
    std::size_t view = 0;
    Rect rect;
    bool operator==(const CorruptRegion&) const = default;
};

struct SynthSpec {
    int splats = 200;
    int views = 12;
    int width = 64;
    int height = 64;
    double focal = 56.0;
    /// Look-at arc about the scene center, starting at the reference view.
    double arc_radius = 4.0;
    double arc_degrees = 40.0;
    /// Explicit corruption rectangles; when empty, `corrupt_views` get one centered rectangle
    /// covering `corrupt_fraction` of the frame.
    std::vector<CorruptRegion> regions;
    std::vector<std::size_t> corrupt_views;
    double corrupt_fraction = 0.1;
    CorruptionMode corrupt_mode = CorruptionMode::Recolor;
};

struct PipelineConfig {
    std::string profile = "paper";
    std::uint64_t seed = 0;

    std::filesystem::path dataset_dir = "dataset";
    std::filesystem::path output_dir = "run";
    std::filesystem::path exchange_dir = "exchange";

    /// "oracle" blends toward dataset ground truth; "exchange" talks to an external refiner through exchange_dir.
    std::string refiner = "oracle";
    long refiner_timeout_ms = 600000;
    double oracle_noise = 0.02;
    /// Std-dev (m) of the seeded noise the oracle depth estimator adds to ground-truth depth.
    double depth_noise = 0.0;

    geometry::ExpansionConfig expansion;
    /// Auxiliary views for initialization; empty means every non-reference view.
    std::vector<std::size_t> aux_views;
    std::size_t reference_view = 0;
    /// Upper bound on splats seeded from the initial point cloud.
    long init_splats = 1500;
    double init_opacity = 0.5;

    train::TrainConfig train;
    SynthSpec synth;

    /// Throws Config on out-of-range values.
    void validate() const;
};

/// Schedule presets: paper (15000 / 2000), desk (3000 / 400), smoke (500 / 100, 8 views).
/// Throws Config for unknown names.
void apply_profile(PipelineConfig& config, const std::string& profile);

/// Line-oriented "key = value"; '#' starts a comment. A `profile` key is applied before the others.
PipelineConfig parse_config(const std::string& text, const std::string& source,
                            const std::optional<std::string>& profile_override = std::nullopt);
PipelineConfig load_config(const std::filesystem::path& path,
                           const std::optional<std::string>& profile_override = std::nullopt);
/// Every key, one per line, in a fixed order.
std::string serialize_config(const PipelineConfig& config);

} // namespace iags::pipeline
