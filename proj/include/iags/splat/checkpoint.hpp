// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iags/splat/splat.hpp"

#include <filesystem>
#include <string>

namespace iags::splat {

/// Header "count bg_r bg_g bg_b", then one line per splat:
/// "mu(3) log_scale(3) quat(4) opacity_logit color(3)". Numbers round-trip exactly.
std::string format_field(const SplatField& field);
SplatField parse_field(const std::string& text, const std::string& source);

void write_field(const std::filesystem::path& path, const SplatField& field);
SplatField read_field(const std::filesystem::path& path);

} // namespace iags::splat
