#pragma once

#include <optional>

#include "fruitscan/geometry.hpp"
#include "fruitscan/raster.hpp"

namespace fruitscan::pose {

struct KeypointPair {
    geometry::Point body;
    std::optional<geometry::Point> carpopodium;
};

struct PoseResult {
    double dx = 0.0;            ///< carpopodium.x - body.x
    double dy = 0.0;            ///< carpopodium.y - body.y (image y points down)
    double theta = 0.0;         ///< angle to screen-up, [0, pi]
    double theta_signed = 0.0;  ///< (-pi, pi]; positive when the carpopodium leans right
};

/// Pose vector and its angle to the screen-up direction (0, -1).
/// Throws PoseUnavailable without a carpopodium, Degenerate for a zero vector.
PoseResult compute_pose(const KeypointPair& kp);

/// Resamples `image` rotated by `angle` about `center` (same convention as
/// geometry::rotate_polygon). Output has the input's size; samples that map
/// from outside the source are black. Bilinear interpolation.
ImageBuffer rotate_image(const ImageBuffer& image, geometry::Point center, double angle);

struct CorrectedFruit {
    ImageBuffer image;
    geometry::Polygon polygon;
    KeypointPair keypoints;
    PoseResult pose;  ///< pose measured before correction
};

/// Rotates image, polygon and keypoints about the image center so the
/// carpopodium ends up directly above the body.
CorrectedFruit correct_pose(const ImageBuffer& image, const geometry::Polygon& poly, const KeypointPair& kp);

inline geometry::Point image_center(const ImageBuffer& image) {
    return {0.5 * image.width(), 0.5 * image.height()};
}

}  // namespace fruitscan::pose
