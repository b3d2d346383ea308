// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/text_io.hpp"

#include "iags/common/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace iags::io {

std::string format_double(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw Error(ErrorCategory::InvalidInput, "cannot format number");
    return std::string(buf, end);
}

std::vector<std::string> split_tokens(std::string_view line)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
            ++j;
        if (j > i)
            out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_double(std::string_view token, std::string_view context)
{
    if (token == "inf")
        return INFINITY;
    if (token == "-inf")
        return -INFINITY;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw Error(ErrorCategory::InvalidInput,
                    std::string(context) + ": expected a number, got '" + std::string(token) + "'");
    return v;
}

long parse_long(std::string_view token, std::string_view context)
{
    long v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw Error(ErrorCategory::InvalidInput,
                    std::string(context) + ": expected an integer, got '" + std::string(token) + "'");
    return v;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCategory::Io, "cannot write '" + path.string() + "'");
    out << contents;
    if (!out)
        throw Error(ErrorCategory::Io, "failed writing '" + path.string() + "'");
}

} // namespace iags::io
