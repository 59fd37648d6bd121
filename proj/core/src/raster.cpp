#include "fruitscan/raster.hpp"

#include <algorithm>

namespace fruitscan {

namespace {

void check_image_shape(int width, int height, int channels) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw Error(ErrorCode::Unsupported, "image must have 1 or 3 channels");
    }
}

}  // namespace

ImageBuffer::ImageBuffer(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    check_image_shape(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(channels),
                 fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_image_shape(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                            static_cast<std::size_t>(channels)) {
        throw Error(ErrorCode::DimensionMismatch, "image data length does not match dimensions");
    }
}

DepthMap::DepthMap(int width, int height, std::vector<double> cm)
    : values_(width, height, std::move(cm)) {
    if (std::any_of(values_.data().begin(), values_.data().end(),
                    [](double v) { return !(v >= 0.0); })) {
        throw Error(ErrorCode::InvalidArgument, "depth values must be non-negative");
    }
}

}  // namespace fruitscan
