#include "fruitscan/phenotype.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fruitscan::phenotype {

PixelRect to_pixel_rect(const formats::Box& box) {
    const int x0 = static_cast<int>(std::floor(box.x));
    const int y0 = static_cast<int>(std::floor(box.y));
    const int x1 = static_cast<int>(std::ceil(box.x + box.w));
    const int y1 = static_cast<int>(std::ceil(box.y + box.h));
    return {x0, y0, x1 - x0, y1 - y0};
}

ImageBuffer crop_individual(const ImageBuffer& image, const formats::Box& box) {
    if (!(box.w > 0.0) || !(box.h > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "crop box must have positive width and height");
    }
    const PixelRect r = to_pixel_rect(box);
    if (r.x < 0 || r.y < 0 || r.x + r.w > image.width() || r.y + r.h > image.height()) {
        throw Error(ErrorCode::OutOfBounds, "crop box exceeds image bounds");
    }
    ImageBuffer out(r.w, r.h, image.channels());
    const auto row_bytes = static_cast<std::size_t>(r.w) * static_cast<std::size_t>(image.channels());
    for (int j = 0; j < r.h; ++j) {
        const auto src = image.data().begin() +
                         static_cast<std::ptrdiff_t>((static_cast<std::size_t>(r.y + j) * image.width() + r.x) *
                                                     image.channels());
        std::copy_n(src, row_bytes,
                    out.data().begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(j) * row_bytes));
    }
    return out;
}

PixelPhenotype measure(const geometry::Polygon& poly, Diagnostics* diag) {
    const geometry::Extents e = geometry::extents(poly);
    PixelPhenotype p;
    p.width_px = e.width();
    p.height_px = e.height();
    p.area_px2 = geometry::polygon_area(poly, diag);

    const int first_row = static_cast<int>(std::ceil(e.min_y));
    const int last_row = static_cast<int>(std::floor(e.max_y));
    double volume = 0.0;
    for (int r = first_row; r < last_row; ++r) {
        const double radius = 0.5 * geometry::scanline_diameter(poly, r + 0.5);
        volume += std::numbers::pi * radius * radius;
    }
    p.volume_px3 = volume;

    if (!(p.width_px > 0.0) || !(p.height_px > 0.0) || !(p.volume_px3 > 0.0)) {
        throw Error(ErrorCode::Degenerate, "polygon is too thin to measure (under one pixel row)");
    }
    return p;
}

}  // namespace fruitscan::phenotype
