// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/splat/checkpoint.hpp"

#include "iags/common/error.hpp"
#include "iags/common/text_io.hpp"

#include <sstream>

namespace iags::splat {

std::string format_field(const SplatField& field)
{
    std::string out = std::to_string(field.size());
    for (int i = 0; i < 3; ++i)
        out += ' ' + io::format_double(field.background(i));
    out += '\n';
    for (const Splat& s : field.splats) {
        std::string line;
        const auto put = [&line](double v) {
            if (!line.empty())
                line += ' ';
            line += io::format_double(v);
        };
        for (int i = 0; i < 3; ++i)
            put(s.mean(i));
        for (int i = 0; i < 3; ++i)
            put(s.log_scale(i));
        for (int i = 0; i < 4; ++i)
            put(s.quat(i));
        put(s.opacity_logit);
        for (int i = 0; i < 3; ++i)
            put(s.color(i));
        out += line;
        out += '\n';
    }
    return out;
}

SplatField parse_field(const std::string& text, const std::string& source)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCategory::InvalidInput, source + ": empty field checkpoint");
    const auto head = io::split_tokens(line);
    if (head.size() != 4)
        throw Error(ErrorCategory::InvalidInput, source + ": header must be 'count bg_r bg_g bg_b'");
    const long count = io::parse_long(head[0], source + ":1");
    if (count < 0)
        throw Error(ErrorCategory::InvalidInput, source + ": negative splat count");
    SplatField field;
    for (int i = 0; i < 3; ++i)
        field.background(i) = io::parse_double(head[1 + i], source + ":1");
    field.splats.reserve(static_cast<std::size_t>(count));
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = io::split_tokens(line);
        if (tok.empty())
            continue;
        const std::string ctx = source + ":" + std::to_string(line_no);
        if (tok.size() != 14)
            throw Error(ErrorCategory::InvalidInput, ctx + ": expected 14 values per splat");
        Splat s;
        std::size_t k = 0;
        for (int i = 0; i < 3; ++i)
            s.mean(i) = io::parse_double(tok[k++], ctx);
        for (int i = 0; i < 3; ++i)
            s.log_scale(i) = io::parse_double(tok[k++], ctx);
        for (int i = 0; i < 4; ++i)
            s.quat(i) = io::parse_double(tok[k++], ctx);
        s.opacity_logit = io::parse_double(tok[k++], ctx);
        for (int i = 0; i < 3; ++i)
            s.color(i) = io::parse_double(tok[k++], ctx);
        field.splats.push_back(s);
    }
    if (field.splats.size() != static_cast<std::size_t>(count))
        throw Error(ErrorCategory::InvalidInput, source + ": header declares " + std::to_string(count) + " splats, found " +
                                                     std::to_string(field.splats.size()));
    if (!is_finite(field))
        throw Error(ErrorCategory::InvalidInput, source + ": non-finite splat parameters");
    return field;
}

void write_field(const std::filesystem::path& path, const SplatField& field)
{
    io::write_text_file(path, format_field(field));
}

SplatField read_field(const std::filesystem::path& path)
{
    return parse_field(io::read_text_file(path), path.string());
}

} // namespace iags::splat
