// Copyright Contributors to the iags project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace iags {

/// Row-major interleaved image. Pixel (x, y) channel c lives at ((y * width) + x) * channels + c.
template <class T>
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill)
    {
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
    template <class U>
    bool same_shape(const Image<U>& other) const noexcept
    {
        return other.width() == width_ && other.height() == height_;
    }

    T& operator()(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
    const T& operator()(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    std::size_t index(int x, int y, int c = 0) const noexcept
    {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

/// RGB in [0,1].
using ColorImage = Image<double>;
/// Single-channel real map (depth, residual, probabilities, change weights).
using ScalarMap = Image<double>;
/// Single-channel binary mask; 0 or 1.
using Mask = Image<std::uint8_t>;

inline constexpr double kDepthSentinel = std::numeric_limits<double>::infinity();

inline ColorImage make_color(int width, int height, double fill = 0.0) { return ColorImage(width, height, 3, fill); }
inline ScalarMap make_scalar(int width, int height, double fill = 0.0) { return ScalarMap(width, height, 1, fill); }
inline Mask make_mask(int width, int height, std::uint8_t fill = 0) { return Mask(width, height, 1, fill); }

Mask mask_not(const Mask& m);
Mask mask_or(const Mask& a, const Mask& b);
Mask mask_and(const Mask& a, const Mask& b);
std::size_t mask_count(const Mask& m);
bool mask_subset(const Mask& inner, const Mask& outer);

} // namespace iags
