#pragma once

#include "fruitscan/formats.hpp"
#include "fruitscan/geometry.hpp"
#include "fruitscan/raster.hpp"

namespace fruitscan::phenotype {

/// Traits in pixel units, measured on a pose-corrected contour.
struct PixelPhenotype {
    double width_px = 0.0;
    double height_px = 0.0;
    double area_px2 = 0.0;
    double volume_px3 = 0.0;
};

/// Integer pixel rectangle covering a (possibly fractional) detection box.
struct PixelRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// floor() of the origin, ceil() of the far corner.
PixelRect to_pixel_rect(const formats::Box& box);

/// Copies the box region. Callers translate contours and keypoints by
/// (-rect.x, -rect.y) to move them into crop coordinates.
ImageBuffer crop_individual(const ImageBuffer& image, const formats::Box& box);

/// Width/height from the contour extents, area by shoelace, and volume as a
/// solid of revolution: each 1 px row contributes a disc of diameter D
/// sampled at the row center (midpoint rule over [ceil(min_y), floor(max_y))).
PixelPhenotype measure(const geometry::Polygon& poly, Diagnostics* diag = nullptr);

}  // namespace fruitscan::phenotype
