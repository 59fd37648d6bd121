#include "fruitscan/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fruitscan::pose {

using geometry::Point;

PoseResult compute_pose(const KeypointPair& kp) {
    if (!kp.carpopodium) {
        throw Error(ErrorCode::PoseUnavailable, "carpopodium keypoint missing; pose unavailable");
    }
    PoseResult r;
    r.dx = kp.carpopodium->x - kp.body.x;
    r.dy = kp.carpopodium->y - kp.body.y;
    const double norm = std::hypot(r.dx, r.dy);
    if (!(norm > 0.0)) {
        throw Error(ErrorCode::Degenerate, "body and carpopodium coincide; pose vector has zero length");
    }
    // e_y = (0, -1): screen-up in image coordinates.
    r.theta = std::acos(std::clamp(-r.dy / norm, -1.0, 1.0));
    r.theta_signed = std::atan2(r.dx, -r.dy);
    if (r.theta_signed <= -std::numbers::pi) r.theta_signed = std::numbers::pi;
    return r;
}

ImageBuffer rotate_image(const ImageBuffer& image, Point center, double angle) {
    const int w = image.width();
    const int h = image.height();
    const int ch = image.channels();
    ImageBuffer out(w, h, ch, 0);
    // Inverse map: each output center samples the source at R(-angle)(q - c) + c.
    const double c = std::cos(-angle);
    const double s = std::sin(-angle);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            const double qx = i + 0.5 - center.x;
            const double qy = j + 0.5 - center.y;
            const double px = center.x + qx * c - qy * s;
            const double py = center.y + qx * s + qy * c;
            if (px < 0.0 || py < 0.0 || px >= w || py >= h) continue;

            const double u = px - 0.5;
            const double v = py - 0.5;
            const int x0 = static_cast<int>(std::floor(u));
            const int y0 = static_cast<int>(std::floor(v));
            const double fx = u - x0;
            const double fy = v - y0;
            const int xa = std::clamp(x0, 0, w - 1);
            const int xb = std::clamp(x0 + 1, 0, w - 1);
            const int ya = std::clamp(y0, 0, h - 1);
            const int yb = std::clamp(y0 + 1, 0, h - 1);
            for (int k = 0; k < ch; ++k) {
                const double top = (1.0 - fx) * image(xa, ya, k) + fx * image(xb, ya, k);
                const double bottom = (1.0 - fx) * image(xa, yb, k) + fx * image(xb, yb, k);
                const double value = (1.0 - fy) * top + fy * bottom;
                out(i, j, k) = static_cast<std::uint8_t>(std::clamp(std::round(value), 0.0, 255.0));
            }
        }
    }
    return out;
}

CorrectedFruit correct_pose(const ImageBuffer& image, const geometry::Polygon& poly, const KeypointPair& kp) {
    const PoseResult pose = compute_pose(kp);
    if (pose.theta_signed == 0.0) {
        return CorrectedFruit{image, poly, kp, pose};
    }
    const Point center = image_center(image);
    const double angle = -pose.theta_signed;
    KeypointPair moved{geometry::rotate_point(kp.body, center, angle),
                       geometry::rotate_point(*kp.carpopodium, center, angle)};
    return CorrectedFruit{rotate_image(image, center, angle), geometry::rotate_polygon(poly, center, angle),
                          moved, pose};
}

}  // namespace fruitscan::pose
