#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace dse {

struct Point2D {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point2D&) const = default;
};

double distance(Point2D a, Point2D b);

// Ordered vertex list with at least two points and distinct consecutive
// vertices. A polyline whose first and last vertices coincide is treated as
// a closed loop by the projection/clipping helpers.
struct Polyline {
    std::vector<Point2D> points;

    bool operator==(const Polyline&) const = default;

    // Empty string when valid, otherwise the reason.
    std::string check() const;

    bool is_closed(double eps = 1e-9) const;
};

// Sum of segment Euclidean lengths.
double arc_length(const Polyline& p);

struct Projection {
    double arc = 0.0;       // arc-length offset of the closest point
    double distance = 0.0;  // Euclidean distance to the polyline
    Point2D point;          // the closest point itself
};

// Closest point on the polyline; ties resolved toward the smallest arc
// offset so projections are deterministic on loops.
Projection project(const Polyline& line, Point2D q);

// Point at the given arc-length offset (clamped to [0, length]).
Point2D point_at_arc(const Polyline& line, double arc);

// Sub-polyline between two arc offsets, endpoints interpolated exactly.
// Requires arc0 < arc1 after clamping.
Polyline slice(const Polyline& line, double arc0, double arc1);

// Minimum distance from a point to any segment of the polyline.
double distance_to(const Polyline& line, Point2D q);

// Unit tangent of the segment containing the given arc offset.
Point2D tangent_at_arc(const Polyline& line, double arc);

// N >= 2 points spaced uniformly in arc length from start to end.
Polyline resample(const Polyline& line, int n);

// Diagonal of the axis-aligned bounding box.
double bounding_box_diagonal(const Polyline& line);

} // namespace dse
