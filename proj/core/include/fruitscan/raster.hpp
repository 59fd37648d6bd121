#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fruitscan/error.hpp"

namespace fruitscan {

/// Dense row-major scalar grid. Used for binary masks, gradient maps and
/// intermediate planes.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }
    Grid(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw Error(ErrorCode::DimensionMismatch, "grid data length does not match dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }

    /// Zero outside the grid.
    T at_or_zero(int x, int y) const {
        if (x < 0 || y < 0 || x >= width_ || y >= height_) return T{};
        return data_[index(x, y)];
    }

    const std::vector<T>& data() const noexcept { return data_; }
    std::vector<T>& data() noexcept { return data_; }

    bool same_shape(const Grid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using RasterGrid = Grid<double>;

/// 8-bit interleaved image with 1 (gray) or 3 (RGB) channels.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);
    ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }

    std::uint8_t& operator()(int x, int y, int c) { return data_[index(x, y, c)]; }
    std::uint8_t operator()(int x, int y, int c) const { return data_[index(x, y, c)]; }

    const std::vector<std::uint8_t>& data() const noexcept { return data_; }
    std::vector<std::uint8_t>& data() noexcept { return data_; }

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel depth in centimeters. A value of 0 means "no reading".
class DepthMap {
public:
    DepthMap() = default;
    DepthMap(int width, int height, std::vector<double> cm);

    int width() const noexcept { return values_.width(); }
    int height() const noexcept { return values_.height(); }

    double operator()(int x, int y) const { return values_(x, y); }
    bool has_reading(int x, int y) const { return values_(x, y) > 0.0; }

    const std::vector<double>& data() const noexcept { return values_.data(); }

    friend bool operator==(const DepthMap&, const DepthMap&) = default;

private:
    Grid<double> values_;
};

}  // namespace fruitscan
