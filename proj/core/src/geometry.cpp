#include "fruitscan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fruitscan::geometry {

namespace {

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int orientation(Point o, Point a, Point b) {
    const double c = cross(o, a, b);
    return (c > 0.0) - (c < 0.0);
}

bool on_segment(Point p, Point a, Point b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(c, a, b)) return true;
    if (o2 == 0 && on_segment(d, a, b)) return true;
    if (o3 == 0 && on_segment(a, c, d)) return true;
    if (o4 == 0 && on_segment(b, c, d)) return true;
    return false;
}

double raw_shoelace(const std::vector<Point>& v) {
    double sum = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = v[i];
        const Point& b = v[(i + 1) % n];
        sum += a.x * b.y - b.x * a.y;
    }
    return 0.5 * sum;
}

// x where edge (a, b) crosses the horizontal line at y. Shared by contains()
// and rasterize() so both agree bit-for-bit.
double crossing_x(Point a, Point b, double y) {
    return a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) {
        throw Error(ErrorCode::Degenerate, "polygon needs at least 3 vertices, got " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = vertices_[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw Error(ErrorCode::InvalidArgument, "polygon vertex is not finite");
        }
        if (p == vertices_[(i + 1) % n]) {
            throw Error(ErrorCode::Degenerate,
                        "polygon has identical consecutive vertices at index " + std::to_string(i));
        }
    }
    const auto [min_x, max_x] = std::minmax_element(
        vertices_.begin(), vertices_.end(), [](Point a, Point b) { return a.x < b.x; });
    const auto [min_y, max_y] = std::minmax_element(
        vertices_.begin(), vertices_.end(), [](Point a, Point b) { return a.y < b.y; });
    const double box = (max_x->x - min_x->x) * (max_y->y - min_y->y);
    if (!(std::abs(raw_shoelace(vertices_)) > 1e-12 * std::max(1.0, box))) {
        throw Error(ErrorCode::Degenerate, "polygon encloses zero area");
    }
}

double Extents::diagonal() const noexcept { return std::hypot(width(), height()); }

Extents extents(const Polygon& poly) {
    Extents e{poly[0].x, poly[0].x, poly[0].y, poly[0].y};
    for (const Point& p : poly.vertices()) {
        e.min_x = std::min(e.min_x, p.x);
        e.max_x = std::max(e.max_x, p.x);
        e.min_y = std::min(e.min_y, p.y);
        e.max_y = std::max(e.max_y, p.y);
    }
    return e;
}

double signed_area(const Polygon& poly) { return raw_shoelace(poly.vertices()); }

bool is_self_intersecting(const Polygon& poly) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            // Adjacent edges share a vertex by construction.
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(a, b, v[j], v[(j + 1) % n])) return true;
        }
    }
    return false;
}

double polygon_area(const Polygon& poly, Diagnostics* diag) {
    if (diag != nullptr && is_self_intersecting(poly)) {
        diag->warn("self-intersecting polygon: area is the absolute shoelace value");
    }
    return std::abs(signed_area(poly));
}

double scanline_diameter(const Polygon& poly, double y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = v[i];
        const Point b = v[(i + 1) % n];
        if (a.y == b.y) {
            if (a.y == y) {
                lo = std::min({lo, a.x, b.x});
                hi = std::max({hi, a.x, b.x});
            }
            continue;
        }
        if (y < std::min(a.y, b.y) || y > std::max(a.y, b.y)) continue;
        const double x = crossing_x(a, b, y);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi >= lo ? hi - lo : 0.0;
}

bool contains(const Polygon& poly, Point p) {
    bool inside = false;
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = v[j];
        const Point b = v[i];
        if ((a.y > p.y) != (b.y > p.y) && p.x < crossing_x(a, b, p.y)) {
            inside = !inside;
        }
    }
    return inside;
}

RasterGrid rasterize(const Polygon& poly, int width, int height, Diagnostics* diag) {
    RasterGrid grid(width, height, 0.0);
    const Extents e = extents(poly);
    if (diag != nullptr && (e.min_x < 0.0 || e.min_y < 0.0 || e.max_x > width || e.max_y > height)) {
        diag->warn("polygon exceeds the " + std::to_string(width) + "x" + std::to_string(height) +
                   " raster and was clipped");
    }

    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<double> xs;
    xs.reserve(n);
    const int row_begin = std::max(0, static_cast<int>(std::floor(e.min_y)) - 1);
    const int row_end = std::min(height, static_cast<int>(std::ceil(e.max_y)) + 1);
    for (int j = row_begin; j < row_end; ++j) {
        const double yc = j + 0.5;
        xs.clear();
        for (std::size_t i = 0, k = n - 1; i < n; k = i++) {
            const Point a = v[k];
            const Point b = v[i];
            if ((a.y > yc) != (b.y > yc)) xs.push_back(crossing_x(a, b, yc));
        }
        std::sort(xs.begin(), xs.end());
        // A center cx is inside iff an odd number of crossings lie strictly
        // right of it, i.e. cx in [xs[2m], xs[2m+1]).
        const auto first_at_or_after = [width](double x) {
            int i = static_cast<int>(std::clamp(std::ceil(x - 0.5), -1.0, width + 1.0));
            while (i > 0 && (i - 1) + 0.5 >= x) --i;
            while (i < width && i + 0.5 < x) ++i;
            return std::clamp(i, 0, width);
        };
        for (std::size_t m = 0; m + 1 < xs.size(); m += 2) {
            const int begin = first_at_or_after(xs[m]);
            const int end = first_at_or_after(xs[m + 1]);
            for (int i = begin; i < end; ++i) grid(i, j) = 1.0;
        }
    }
    if (diag != nullptr && std::all_of(grid.data().begin(), grid.data().end(),
                                       [](double c) { return c == 0.0; })) {
        diag->warn("rasterized polygon covers no pixel centers");
    }
    return grid;
}

double point_to_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const Point ap = p - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    const double dot = ap.x * ab.x + ap.y * ab.y;
    if (len2 <= 0.0 || dot <= 0.0) return std::hypot(ap.x, ap.y);
    if (dot >= len2) return std::hypot(p.x - b.x, p.y - b.y);
    // Perpendicular distance; exactly zero for points on the supporting line.
    return std::abs(ab.x * ap.y - ab.y * ap.x) / std::sqrt(len2);
}

double point_to_polygon_distance(Point p, const Polygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, point_to_segment_distance(p, v[i], v[(i + 1) % n]));
    }
    return best;
}

double perimeter(const Polygon& poly) {
    double total = 0.0;
    const auto& v = poly.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point d = v[(i + 1) % v.size()] - v[i];
        total += std::hypot(d.x, d.y);
    }
    return total;
}

std::vector<Point> sample_boundary(const Polygon& poly, int n) {
    if (n < 3) {
        throw Error(ErrorCode::InvalidArgument, "boundary sample count must be >= 3");
    }
    const auto& v = poly.vertices();
    const std::size_t edges = v.size();
    std::vector<double> cumulative(edges + 1, 0.0);
    for (std::size_t i = 0; i < edges; ++i) {
        const Point d = v[(i + 1) % edges] - v[i];
        cumulative[i + 1] = cumulative[i] + std::hypot(d.x, d.y);
    }
    const double total = cumulative[edges];

    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t edge = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * k / n;
        while (edge + 1 < edges && cumulative[edge + 1] < s) ++edge;
        const double len = cumulative[edge + 1] - cumulative[edge];
        const double t = std::clamp((s - cumulative[edge]) / len, 0.0, 1.0);
        const Point a = v[edge];
        const Point b = v[(edge + 1) % edges];
        out.push_back(a + t * (b - a));
    }
    return out;
}

Point rotate_point(Point p, Point center, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    return {center.x + dx * c - dy * s, center.y + dx * s + dy * c};
}

Polygon rotate_polygon(const Polygon& poly, Point center, double angle) {
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const Point& p : poly.vertices()) out.push_back(rotate_point(p, center, angle));
    return Polygon(std::move(out));
}

Polygon translate_polygon(const Polygon& poly, Point offset) {
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const Point& p : poly.vertices()) out.push_back(p + offset);
    return Polygon(std::move(out));
}

Polygon scale_polygon(const Polygon& poly, double factor) {
    if (!(factor > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
    }
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const Point& p : poly.vertices()) out.push_back(factor * p);
    return Polygon(std::move(out));
}

}  // namespace fruitscan::geometry
