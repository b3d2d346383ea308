// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/common/image.hpp"

#include <filesystem>

namespace iags::io {

/// 8-bit RGB. Values are clamped to [0,1] and rounded to the nearest code.
void write_color_png(const std::filesystem::path& path, const ColorImage& image);
ColorImage read_color_png(const std::filesystem::path& path);

/// 8-bit single channel, 0/255.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

/// 8-bit single channel of values in [0,1], stored as round(v * 255).
void write_unit_png(const std::filesystem::path& path, const ScalarMap& map);
ScalarMap read_unit_png(const std::filesystem::path& path);

/// 16-bit single channel; code = round(depth / scale), 0 encodes the empty-depth sentinel.
void write_depth_png(const std::filesystem::path& path, const ScalarMap& depth, double scale);
ScalarMap read_depth_png(const std::filesystem::path& path, double scale);

} // namespace iags::io
