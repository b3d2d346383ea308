// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#include "iags/common/png_io.hpp"

#include "iags/common/error.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

namespace iags::io {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept
    {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw Error(ErrorCategory::Io, "cannot open '" + path.string() + "'");
    return f;
}

// Raw sample buffer: row-major, `channels` interleaved, `bit_depth` 8 or 16 (16-bit stored big-endian on disk).
struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

void write_raw(const std::filesystem::path& path, const RawPng& raw)
{
    FilePtr file = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw Error(ErrorCategory::Io, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorCategory::Io, "png_create_info_struct failed");
    }

    const int bytes_per_sample = raw.bit_depth / 8;
    std::vector<png_byte> row(static_cast<std::size_t>(raw.width) * raw.channels * bytes_per_sample);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorCategory::Io, "failed writing '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    const int color_type = raw.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    png_set_IHDR(png, info, raw.width, raw.height, raw.bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    const std::size_t per_row = static_cast<std::size_t>(raw.width) * raw.channels;
    for (int y = 0; y < raw.height; ++y) {
        for (std::size_t i = 0; i < per_row; ++i) {
            const std::uint16_t v = raw.samples[y * per_row + i];
            if (bytes_per_sample == 1) {
                row[i] = static_cast<png_byte>(v);
            } else {
                row[2 * i] = static_cast<png_byte>(v >> 8);
                row[2 * i + 1] = static_cast<png_byte>(v & 0xff);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

RawPng read_raw(const std::filesystem::path& path, int expected_channels, int expected_depth)
{
    FilePtr file = open_file(path, "rb");
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw Error(ErrorCategory::Io, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCategory::Io, "png_create_info_struct failed");
    }
    RawPng raw;
    std::vector<png_byte> row;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCategory::Io, "failed reading '" + path.string() + "'");
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    raw.channels = png_get_channels(png, info);
    const bool ok_type = (expected_channels == 3 && color_type == PNG_COLOR_TYPE_RGB) ||
                         (expected_channels == 1 && color_type == PNG_COLOR_TYPE_GRAY);
    if (!ok_type || raw.bit_depth != expected_depth) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorCategory::Io, "'" + path.string() + "' has unexpected PNG format (want " +
                                           std::to_string(expected_channels) + " channel(s), " +
                                           std::to_string(expected_depth) + "-bit)");
    }
    const int bytes_per_sample = raw.bit_depth / 8;
    const std::size_t per_row = static_cast<std::size_t>(raw.width) * raw.channels;
    row.resize(per_row * bytes_per_sample);
    raw.samples.resize(per_row * raw.height);
    for (int y = 0; y < raw.height; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (std::size_t i = 0; i < per_row; ++i) {
            raw.samples[y * per_row + i] = bytes_per_sample == 1
                ? row[i]
                : static_cast<std::uint16_t>((row[2 * i] << 8) | row[2 * i + 1]);
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return raw;
}

std::uint16_t to_code(double v, double max_code)
{
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_code));
}

} // namespace

void write_color_png(const std::filesystem::path& path, const ColorImage& image)
{
    RawPng raw{image.width(), image.height(), 3, 8, {}};
    raw.samples.resize(image.size());
    for (std::size_t i = 0; i < image.size(); ++i)
        raw.samples[i] = to_code(image[i], 255.0);
    write_raw(path, raw);
}

ColorImage read_color_png(const std::filesystem::path& path)
{
    const RawPng raw = read_raw(path, 3, 8);
    ColorImage out(raw.width, raw.height, 3);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = raw.samples[i] / 255.0;
    return out;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask)
{
    RawPng raw{mask.width(), mask.height(), 1, 8, {}};
    raw.samples.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        raw.samples[i] = mask[i] ? 255 : 0;
    write_raw(path, raw);
}

Mask read_mask_png(const std::filesystem::path& path)
{
    const RawPng raw = read_raw(path, 1, 8);
    Mask out(raw.width, raw.height, 1);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = raw.samples[i] >= 128 ? 1 : 0;
    return out;
}

void write_unit_png(const std::filesystem::path& path, const ScalarMap& map)
{
    RawPng raw{map.width(), map.height(), 1, 8, {}};
    raw.samples.resize(map.size());
    for (std::size_t i = 0; i < map.size(); ++i)
        raw.samples[i] = to_code(map[i], 255.0);
    write_raw(path, raw);
}

ScalarMap read_unit_png(const std::filesystem::path& path)
{
    const RawPng raw = read_raw(path, 1, 8);
    ScalarMap out(raw.width, raw.height, 1);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = raw.samples[i] / 255.0;
    return out;
}

void write_depth_png(const std::filesystem::path& path, const ScalarMap& depth, double scale)
{
    if (!(scale > 0.0))
        throw Error(ErrorCategory::InvalidInput, "depth scale must be positive");
    RawPng raw{depth.width(), depth.height(), 1, 16, {}};
    raw.samples.resize(depth.size());
    for (std::size_t i = 0; i < depth.size(); ++i) {
        const double d = depth[i];
        if (!std::isfinite(d) || d <= 0.0) {
            raw.samples[i] = 0;
        } else {
            raw.samples[i] = static_cast<std::uint16_t>(std::clamp<long>(std::lround(std::min(d / scale, 65535.0)), 1, 65535));
        }
    }
    write_raw(path, raw);
}

ScalarMap read_depth_png(const std::filesystem::path& path, double scale)
{
    const RawPng raw = read_raw(path, 1, 16);
    ScalarMap out(raw.width, raw.height, 1);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = raw.samples[i] == 0 ? kDepthSentinel : raw.samples[i] * scale;
    return out;
}

} // namespace iags::io
