#include "fruitscan/edgeops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "fruitscan/formats.hpp"

namespace fruitscan::edgeops {

namespace {

constexpr int kSobelX[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
constexpr int kSobelY[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};

std::uint8_t to_sample(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

// Stays strictly inside (0, 1) even where the exact value rounds to 0 or 1.
double sigmoid(double x) {
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return std::clamp(s, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

}  // namespace

GradientMap sobel(const RasterGrid& grid) {
    const int w = grid.width();
    const int h = grid.height();
    if (w < 3 || h < 3) throw Error(ErrorCode::InvalidArgument, "sobel needs a grid of at least 3x3");
    GradientMap g{RasterGrid(w, h), RasterGrid(w, h), RasterGrid(w, h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sx = 0.0;
            double sy = 0.0;
            for (int ky = 0; ky < 3; ++ky) {
                for (int kx = 0; kx < 3; ++kx) {
                    const double v = grid.at_or_zero(x + kx - 1, y + ky - 1);
                    sx += kSobelX[ky][kx] * v;
                    sy += kSobelY[ky][kx] * v;
                }
            }
            g.gx(x, y) = sx;
            g.gy(x, y) = sy;
            g.magnitude(x, y) = std::sqrt(sx * sx + sy * sy);
        }
    }
    return g;
}

double edge_loss(const RasterGrid& pred, const RasterGrid& gt) {
    if (!pred.same_shape(gt)) {
        throw Error(ErrorCode::DimensionMismatch, "edge loss needs masks of identical size");
    }
    const RasterGrid mp = sobel(pred).magnitude;
    const RasterGrid mg = sobel(gt).magnitude;
    double sum = 0.0;
    for (std::size_t i = 0; i < mp.size(); ++i) sum += std::abs(mp.data()[i] - mg.data()[i]);
    return sum / static_cast<double>(mp.size());
}

double mean_luminance(const ImageBuffer& image) {
    const std::size_t pixels = static_cast<std::size_t>(image.width()) * static_cast<std::size_t>(image.height());
    const auto& d = image.data();
    double sum = 0.0;
    if (image.channels() == 1) {
        for (const std::uint8_t v : d) sum += v;
    } else {
        for (std::size_t i = 0; i < pixels; ++i) {
            sum += 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
        }
    }
    return sum / static_cast<double>(pixels);
}

ImageBuffer enhance_contrast(const ImageBuffer& image, double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "contrast factor must be >= 0");
    const double m = mean_luminance(image);
    ImageBuffer out = image;
    for (auto& v : out.data()) v = to_sample(m + lambda * (v - m));
    return out;
}

ImageBuffer enhance_acutance(const ImageBuffer& image, double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "acutance factor must be >= 0");
    ImageBuffer out = image;
    const int w = image.width();
    const int h = image.height();
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            for (int c = 0; c < image.channels(); ++c) {
                double sum = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) sum += image(x + dx, y + dy, c);
                const double blur = sum / 9.0;
                out(x, y, c) = to_sample(blur + lambda * (image(x, y, c) - blur));
            }
        }
    }
    return out;
}

ImageBuffer edge_boost(const ImageBuffer& image, double lambda_c, double lambda_a) {
    return enhance_acutance(enhance_contrast(image, lambda_c), lambda_a);
}

// ---------------------------------------------------------------------------

FeatureMap::FeatureMap(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw Error(ErrorCode::InvalidArgument, "feature map dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

FeatureMap::FeatureMap(int channels, int height, int width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
    if (channels <= 0 || height <= 0 || width <= 0) {
        throw Error(ErrorCode::InvalidArgument, "feature map dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(channels) * height * width) {
        throw Error(ErrorCode::DimensionMismatch, "feature map data length does not match C x H x W");
    }
}

AttentionWeights AttentionWeights::zeros(int channels) {
    if (channels <= 0 || channels % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "attention block needs an even, positive channel count");
    }
    const int half = channels / 2;
    const auto layer = [](int out, int in, int k) {
        return ConvLayer{out, in, k, std::vector<double>(static_cast<std::size_t>(out) * in * k * k, 0.0),
                         std::vector<double>(static_cast<std::size_t>(out), 0.0)};
    };
    return {layer(half, channels, 3), layer(half, half, 3), layer(1, half, 1)};
}

void AttentionWeights::validate() const {
    const int c = conv1.in_channels;
    if (c <= 0 || c % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "attention block needs an even, positive channel count");
    }
    const int half = c / 2;
    const auto check = [](const ConvLayer& l, int out, int in, int k, const char* name) {
        if (l.out_channels != out || l.in_channels != in || l.kernel != k ||
            l.weights.size() != static_cast<std::size_t>(out) * in * k * k ||
            l.bias.size() != static_cast<std::size_t>(out)) {
            throw Error(ErrorCode::DimensionMismatch, std::string("attention weight shape mismatch in ") + name);
        }
    };
    check(conv1, half, c, 3, "conv1");
    check(conv2, half, half, 3, "conv2");
    check(conv3, 1, half, 1, "conv3");
}

FeatureMap conv2d(const FeatureMap& input, const ConvLayer& layer) {
    if (input.channels() != layer.in_channels) {
        throw Error(ErrorCode::DimensionMismatch, "conv input channels do not match the layer");
    }
    const int h = input.height();
    const int w = input.width();
    const int pad = layer.kernel / 2;
    FeatureMap out(layer.out_channels, h, w);
    for (int o = 0; o < layer.out_channels; ++o) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = layer.bias[static_cast<std::size_t>(o)];
                for (int i = 0; i < layer.in_channels; ++i) {
                    for (int ky = 0; ky < layer.kernel; ++ky) {
                        const int sy = y + ky - pad;
                        if (sy < 0 || sy >= h) continue;
                        for (int kx = 0; kx < layer.kernel; ++kx) {
                            const int sx = x + kx - pad;
                            if (sx < 0 || sx >= w) continue;
                            acc += layer.w(o, i, ky, kx) * input(i, sy, sx);
                        }
                    }
                }
                out(o, y, x) = acc;
            }
        }
    }
    return out;
}

FeatureMap attention_map(const FeatureMap& p5, const AttentionWeights& weights) {
    weights.validate();
    if (p5.channels() != weights.channels()) {
        throw Error(ErrorCode::DimensionMismatch, "feature map channels do not match attention weights");
    }
    const auto relu = [](FeatureMap m) {
        FeatureMap r(m.channels(), m.height(), m.width());
        for (int c = 0; c < m.channels(); ++c)
            for (int y = 0; y < m.height(); ++y)
                for (int x = 0; x < m.width(); ++x) r(c, y, x) = std::max(0.0, m(c, y, x));
        return r;
    };
    const FeatureMap f1 = relu(conv2d(p5, weights.conv1));
    const FeatureMap f2 = relu(conv2d(f1, weights.conv2));
    FeatureMap a = conv2d(f2, weights.conv3);
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) a(0, y, x) = sigmoid(a(0, y, x));
    return a;
}

FeatureMap edge_attention_forward(const FeatureMap& p5, const AttentionWeights& weights) {
    const FeatureMap a = attention_map(p5, weights);
    FeatureMap out(p5.channels(), p5.height(), p5.width());
    for (int c = 0; c < p5.channels(); ++c)
        for (int y = 0; y < p5.height(); ++y)
            for (int x = 0; x < p5.width(); ++x) out(c, y, x) = p5(c, y, x) * a(0, y, x);
    return out;
}

// ---- weight file ------------------------------------------------------------

namespace {

std::uint32_t load_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class WeightReader {
public:
    explicit WeightReader(std::string_view bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        const auto v = load_u32_le(reinterpret_cast<const unsigned char*>(bytes_.data() + pos_));
        pos_ += 4;
        return v;
    }

    std::vector<double> floats(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = static_cast<double>(std::bit_cast<float>(u32()));
        return out;
    }

    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw Error(ErrorCode::Truncated, "attention weight file is truncated");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

AttentionWeights decode_attention_weights(std::string_view bytes) {
    WeightReader in(bytes);
    const std::uint32_t c = in.u32();
    if (c == 0 || c % 2 != 0 || c > (1u << 16)) {
        throw Error(ErrorCode::InvalidArgument, "attention weight file: channel count must be even and positive");
    }
    AttentionWeights w = AttentionWeights::zeros(static_cast<int>(c));
    for (ConvLayer* layer : {&w.conv1, &w.conv2, &w.conv3}) {
        layer->weights = in.floats(layer->weights.size());
        layer->bias = in.floats(layer->bias.size());
    }
    if (!in.at_end()) throw Error(ErrorCode::Parse, "attention weight file has trailing bytes");
    return w;
}

std::string encode_attention_weights(const AttentionWeights& weights) {
    weights.validate();
    std::string out;
    store_u32_le(out, static_cast<std::uint32_t>(weights.channels()));
    for (const ConvLayer* layer : {&weights.conv1, &weights.conv2, &weights.conv3}) {
        for (const auto* block : {&layer->weights, &layer->bias}) {
            for (const double v : *block) store_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        }
    }
    return out;
}

AttentionWeights read_attention_weights(const std::filesystem::path& path) {
    return decode_attention_weights(formats::read_file(path));
}

}  // namespace fruitscan::edgeops
