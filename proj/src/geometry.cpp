#include "dse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dse {

double distance(Point2D a, Point2D b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::string Polyline::check() const {
    if (points.size() < 2) return "polyline needs at least two points";
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return "non-finite coordinate";
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i] == points[i - 1]) return "consecutive duplicate point";
    if (arc_length(*this) <= 0.0) return "zero arc length";
    return {};
}

bool Polyline::is_closed(double eps) const {
    return points.size() >= 3 && distance(points.front(), points.back()) <= eps;
}

double arc_length(const Polyline& p) {
    double total = 0.0;
    for (std::size_t i = 1; i < p.points.size(); ++i)
        total += distance(p.points[i - 1], p.points[i]);
    return total;
}

Projection project(const Polyline& line, Point2D q) {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    double arc_base = 0.0;
    for (std::size_t i = 1; i < line.points.size(); ++i) {
        Point2D a = line.points[i - 1];
        Point2D b = line.points[i];
        double seg_len = distance(a, b);
        double dx = b.x - a.x, dy = b.y - a.y;
        double t = 0.0;
        if (seg_len > 0.0) {
            t = ((q.x - a.x) * dx + (q.y - a.y) * dy) / (seg_len * seg_len);
            t = std::clamp(t, 0.0, 1.0);
        }
        Point2D c{a.x + t * dx, a.y + t * dy};
        double d = distance(q, c);
        // Strict < keeps the earliest arc offset on ties.
        if (d < best.distance - 1e-12) {
            best.distance = d;
            best.arc = arc_base + t * seg_len;
            best.point = c;
        }
        arc_base += seg_len;
    }
    return best;
}

Point2D point_at_arc(const Polyline& line, double arc) {
    double total = arc_length(line);
    arc = std::clamp(arc, 0.0, total);
    double acc = 0.0;
    for (std::size_t i = 1; i < line.points.size(); ++i) {
        double seg = distance(line.points[i - 1], line.points[i]);
        if (acc + seg >= arc || i + 1 == line.points.size()) {
            double t = seg > 0.0 ? (arc - acc) / seg : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const Point2D& a = line.points[i - 1];
            const Point2D& b = line.points[i];
            return Point2D{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        }
        acc += seg;
    }
    return line.points.back();
}

Point2D tangent_at_arc(const Polyline& line, double arc) {
    double total = arc_length(line);
    arc = std::clamp(arc, 0.0, total);
    double acc = 0.0;
    for (std::size_t i = 1; i < line.points.size(); ++i) {
        double seg = distance(line.points[i - 1], line.points[i]);
        if (acc + seg >= arc || i + 1 == line.points.size()) {
            const Point2D& a = line.points[i - 1];
            const Point2D& b = line.points[i];
            if (seg <= 0.0) return Point2D{1.0, 0.0};
            return Point2D{(b.x - a.x) / seg, (b.y - a.y) / seg};
        }
        acc += seg;
    }
    return Point2D{1.0, 0.0};
}

Polyline slice(const Polyline& line, double arc0, double arc1) {
    double total = arc_length(line);
    arc0 = std::clamp(arc0, 0.0, total);
    arc1 = std::clamp(arc1, 0.0, total);
    Polyline out;
    out.points.push_back(point_at_arc(line, arc0));
    double acc = 0.0;
    for (std::size_t i = 1; i < line.points.size(); ++i) {
        double seg = distance(line.points[i - 1], line.points[i]);
        double vertex_arc = acc + seg;
        if (vertex_arc > arc0 && vertex_arc < arc1) {
            Point2D v = line.points[i];
            if (distance(out.points.back(), v) > 1e-12) out.points.push_back(v);
        }
        acc = vertex_arc;
        if (acc >= arc1) break;
    }
    Point2D end = point_at_arc(line, arc1);
    if (distance(out.points.back(), end) > 1e-12) out.points.push_back(end);
    return out;
}

double distance_to(const Polyline& line, Point2D q) {
    return project(line, q).distance;
}

Polyline resample(const Polyline& line, int n) {
    n = std::max(n, 2);
    double total = arc_length(line);
    Polyline out;
    out.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double s = total * static_cast<double>(i) / static_cast<double>(n - 1);
        out.points.push_back(point_at_arc(line, s));
    }
    return out;
}

double bounding_box_diagonal(const Polyline& line) {
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& p : line.points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    return std::hypot(max_x - min_x, max_y - min_y);
}

} // namespace dse
