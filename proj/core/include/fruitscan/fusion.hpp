#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "fruitscan/formats.hpp"
#include "fruitscan/geometry.hpp"
#include "fruitscan/phenotype.hpp"
#include "fruitscan/raster.hpp"

namespace fruitscan::fusion {

/// pixels_per_cm = k / depth_cm
struct CalibrationModel {
    double k = 0.0;
    std::size_t n_samples = 0;
    double rms_residual = 0.0;  ///< pixels per cm

    double pixels_per_cm(double depth_cm) const { return k / depth_cm; }
};

/// Least squares in pixel space: minimizes sum (pixel_i - k / depth_i)^2,
/// which has the closed form k = sum(pixel_i / depth_i) / sum(1 / depth_i^2).
CalibrationModel fit_calibration(std::span<const formats::CalibrationSample> samples);

/// Sum of squared pixel residuals for a candidate k.
double calibration_objective(std::span<const formats::CalibrationSample> samples, double k);

enum class DepthMode { Center, MaskMedian };

DepthMode parse_depth_mode(std::string_view text);
std::string_view to_string(DepthMode mode);

/// Depth for one fruit. Center reads the pixel under the box center;
/// MaskMedian takes the median of positive readings whose pixel centers lie
/// inside `mask` (scene coordinates). Throws MissingDepth when no reading.
double depth_at(const DepthMap& depth, const formats::Box& box, DepthMode mode = DepthMode::Center,
                const geometry::Polygon* mask = nullptr);

struct MetricPhenotype {
    double width_cm = 0.0;
    double height_cm = 0.0;
    double area_cm2 = 0.0;
    double volume_cm3 = 0.0;
    double depth_used_cm = 0.0;
    double scale_px_per_cm = 0.0;
};

/// Divides each pixel trait by (k / depth)^j with j = 1, 1, 2, 3.
MetricPhenotype fuse(const phenotype::PixelPhenotype& px, const CalibrationModel& model, double depth_cm);

}  // namespace fruitscan::fusion
