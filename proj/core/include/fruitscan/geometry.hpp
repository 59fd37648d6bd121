#pragma once

#include <vector>

#include "fruitscan/error.hpp"
#include "fruitscan/raster.hpp"

namespace fruitscan::geometry {

/// Image coordinates: x grows right, y grows down. Pixel (i, j) covers
/// [i, i+1) x [j, j+1) and has its center at (i + 0.5, j + 0.5).
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

/// Closed contour of one fruit. The last vertex connects back to the first.
///
/// Construction enforces: at least 3 vertices, no two consecutive vertices
/// identical (including last/first), and non-zero enclosed area.
class Polygon {
public:
    explicit Polygon(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Point& operator[](std::size_t i) const { return vertices_[i]; }

    friend bool operator==(const Polygon&, const Polygon&) = default;

private:
    std::vector<Point> vertices_;
};

struct Extents {
    double min_x = 0.0;
    double max_x = 0.0;
    double min_y = 0.0;
    double max_y = 0.0;

    double width() const noexcept { return max_x - min_x; }
    double height() const noexcept { return max_y - min_y; }
    double diagonal() const noexcept;

    friend bool operator==(const Extents&, const Extents&) = default;
};

Extents extents(const Polygon& poly);

/// Shoelace sum; positive for counter-clockwise order in a y-up frame.
double signed_area(const Polygon& poly);

/// Absolute shoelace area. Self-intersecting contours still return the
/// absolute shoelace value and add a warning to `diag` when given.
double polygon_area(const Polygon& poly, Diagnostics* diag = nullptr);

bool is_self_intersecting(const Polygon& poly);

/// Horizontal extent (max x - min x) of the closed contour's intersections
/// with the line at height `y`. Zero when the line misses the polygon.
double scanline_diameter(const Polygon& poly, double y);

/// Even-odd point-in-polygon test (crossing number, half-open in y).
bool contains(const Polygon& poly, Point p);

/// Binary mask: cell (i, j) is 1 iff its center is inside under the even-odd
/// rule. Parts outside the grid are clipped and reported through `diag`.
RasterGrid rasterize(const Polygon& poly, int width, int height, Diagnostics* diag = nullptr);

double point_to_segment_distance(Point p, Point a, Point b);

/// Unsigned distance to the contour; interior points get their distance to
/// the nearest edge, not zero.
double point_to_polygon_distance(Point p, const Polygon& poly);

double perimeter(const Polygon& poly);

/// `n` points evenly spaced by arc length, starting at vertex 0 and walking
/// the vertices in stored order.
std::vector<Point> sample_boundary(const Polygon& poly, int n);

/// Rotates each vertex about `center`: x' = c + R(angle) (x - c) with the
/// usual R = [[cos, -sin], [sin, cos]]. Because y points down in image space,
/// a positive angle turns clockwise on screen. The pose module relies on this.
Polygon rotate_polygon(const Polygon& poly, Point center, double angle);
Point rotate_point(Point p, Point center, double angle);

Polygon translate_polygon(const Polygon& poly, Point offset);

/// Uniform scale about the origin.
Polygon scale_polygon(const Polygon& poly, double factor);

}  // namespace fruitscan::geometry
