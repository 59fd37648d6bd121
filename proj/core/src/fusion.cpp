#include "fruitscan/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace fruitscan::fusion {

CalibrationModel fit_calibration(std::span<const formats::CalibrationSample> samples) {
    if (samples.empty()) {
        throw Error(ErrorCode::InvalidArgument, "calibration needs at least one sample");
    }
    double num = 0.0;
    double den = 0.0;
    for (const auto& s : samples) {
        if (!(s.depth_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "calibration depth must be > 0");
        if (!(s.pixels_per_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "calibration pixels must be > 0");
        num += s.pixels_per_cm / s.depth_cm;
        den += 1.0 / (s.depth_cm * s.depth_cm);
    }
    CalibrationModel model;
    model.k = num / den;
    model.n_samples = samples.size();
    model.rms_residual = std::sqrt(calibration_objective(samples, model.k) / static_cast<double>(samples.size()));
    return model;
}

double calibration_objective(std::span<const formats::CalibrationSample> samples, double k) {
    double sum = 0.0;
    for (const auto& s : samples) {
        const double r = s.pixels_per_cm - k / s.depth_cm;
        sum += r * r;
    }
    return sum;
}

DepthMode parse_depth_mode(std::string_view text) {
    if (text == "center") return DepthMode::Center;
    if (text == "mask-median") return DepthMode::MaskMedian;
    throw Error(ErrorCode::InvalidArgument, "unknown depth mode '" + std::string(text) + "'");
}

std::string_view to_string(DepthMode mode) {
    return mode == DepthMode::Center ? "center" : "mask-median";
}

double depth_at(const DepthMap& depth, const formats::Box& box, DepthMode mode, const geometry::Polygon* mask) {
    if (box.x < 0.0 || box.y < 0.0 || box.x + box.w > depth.width() || box.y + box.h > depth.height()) {
        throw Error(ErrorCode::OutOfBounds, "box exceeds the depth map");
    }
    if (mode == DepthMode::Center) {
        const geometry::Point c = box.center();
        const int x = std::clamp(static_cast<int>(std::floor(c.x)), 0, depth.width() - 1);
        const int y = std::clamp(static_cast<int>(std::floor(c.y)), 0, depth.height() - 1);
        if (!depth.has_reading(x, y)) {
            throw Error(ErrorCode::MissingDepth, "no depth reading at box center (" + std::to_string(x) + ", " +
                                                     std::to_string(y) + ")");
        }
        return depth(x, y);
    }

    if (mask == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "mask-median depth needs a fruit polygon");
    }
    const geometry::Extents e = geometry::extents(*mask);
    const int x0 = std::max(0, static_cast<int>(std::floor(e.min_x)));
    const int y0 = std::max(0, static_cast<int>(std::floor(e.min_y)));
    const int x1 = std::min(depth.width(), static_cast<int>(std::ceil(e.max_x)) + 1);
    const int y1 = std::min(depth.height(), static_cast<int>(std::ceil(e.max_y)) + 1);
    std::vector<double> readings;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (depth.has_reading(x, y) && geometry::contains(*mask, {x + 0.5, y + 0.5})) {
                readings.push_back(depth(x, y));
            }
        }
    }
    if (readings.empty()) {
        throw Error(ErrorCode::MissingDepth, "no positive depth readings under the fruit mask");
    }
    std::sort(readings.begin(), readings.end());
    const std::size_t n = readings.size();
    return n % 2 == 1 ? readings[n / 2] : 0.5 * (readings[n / 2 - 1] + readings[n / 2]);
}

MetricPhenotype fuse(const phenotype::PixelPhenotype& px, const CalibrationModel& model, double depth_cm) {
    if (!(depth_cm > 0.0)) throw Error(ErrorCode::InvalidArgument, "depth must be > 0");
    if (!(model.k > 0.0)) throw Error(ErrorCode::InvalidArgument, "calibration coefficient k must be > 0");
    const double s = model.k / depth_cm;
    MetricPhenotype m;
    m.width_cm = px.width_px / s;
    m.height_cm = px.height_px / s;
    m.area_cm2 = px.area_px2 / (s * s);
    m.volume_cm3 = px.volume_px3 / (s * s * s);
    m.depth_used_cm = depth_cm;
    m.scale_px_per_cm = s;
    return m;
}

}  // namespace fruitscan::fusion
