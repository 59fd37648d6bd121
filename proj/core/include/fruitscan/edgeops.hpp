#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fruitscan/raster.hpp"

namespace fruitscan::edgeops {

struct GradientMap {
    RasterGrid gx;
    RasterGrid gy;
    RasterGrid magnitude;
};

/// 3x3 Sobel cross-correlation with zero padding:
///   gx: [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], gy: its transpose.
GradientMap sobel(const RasterGrid& grid);

/// Mean absolute difference of the two Sobel magnitude maps.
double edge_loss(const RasterGrid& pred, const RasterGrid& gt);

inline constexpr double kDefaultContrast = 1.5;
inline constexpr double kDefaultAcutance = 1.6;

/// Image-wide mean luminance (0.299 R + 0.587 G + 0.114 B, or the gray value).
double mean_luminance(const ImageBuffer& image);

/// Every sample blended away from the mean luminance by `lambda`.
ImageBuffer enhance_contrast(const ImageBuffer& image, double lambda);

/// Every interior sample blended away from its 3x3 box-blur by `lambda`;
/// the one-pixel border is copied unchanged.
ImageBuffer enhance_acutance(const ImageBuffer& image, double lambda);

/// Contrast, then acutance.
ImageBuffer edge_boost(const ImageBuffer& image, double lambda_c = kDefaultContrast,
                       double lambda_a = kDefaultAcutance);

// ---- attention block --------------------------------------------------------

/// C x H x W, channel-major.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int channels, int height, int width, double fill = 0.0);
    FeatureMap(int channels, int height, int width, std::vector<double> data);

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }

    double& operator()(int c, int y, int x) { return data_[index(c, y, x)]; }
    double operator()(int c, int y, int x) const { return data_[index(c, y, x)]; }

    const std::vector<double>& data() const noexcept { return data_; }

private:
    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
                   static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
};

/// Convolution layer with weights laid out (out, in, ky, kx).
struct ConvLayer {
    int out_channels = 0;
    int in_channels = 0;
    int kernel = 0;  ///< square kernel side; padding is kernel / 2
    std::vector<double> weights;
    std::vector<double> bias;

    double w(int o, int i, int ky, int kx) const {
        return weights[((static_cast<std::size_t>(o) * in_channels + i) * kernel + ky) * kernel + kx];
    }
};

/// conv1: 3x3 C -> C/2, conv2: 3x3 C/2 -> C/2, conv3: 1x1 C/2 -> 1.
struct AttentionWeights {
    ConvLayer conv1;
    ConvLayer conv2;
    ConvLayer conv3;

    int channels() const noexcept { return conv1.in_channels; }

    /// All-zero weights for `channels` input channels (must be even).
    static AttentionWeights zeros(int channels);
    void validate() const;
};

/// Same-size convolution with zero padding.
FeatureMap conv2d(const FeatureMap& input, const ConvLayer& layer);

/// Single-channel map in (0, 1) computed by the three conv layers.
FeatureMap attention_map(const FeatureMap& p5, const AttentionWeights& weights);

/// p5 scaled element-wise by the attention map.
FeatureMap edge_attention_forward(const FeatureMap& p5, const AttentionWeights& weights);

/// Weight file: uint32 little-endian C, then for conv1, conv2, conv3 the
/// kernel block (out, in, ky, kx) followed by its bias, all float32
/// little-endian.
AttentionWeights decode_attention_weights(std::string_view bytes);
std::string encode_attention_weights(const AttentionWeights& weights);
AttentionWeights read_attention_weights(const std::filesystem::path& path);

}  // namespace fruitscan::edgeops
