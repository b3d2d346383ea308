// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace iags::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Whitespace-separated tokens of one line.
std::vector<std::string> split_tokens(std::string_view line);

double parse_double(std::string_view token, std::string_view context);
long parse_long(std::string_view token, std::string_view context);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

} // namespace iags::io
