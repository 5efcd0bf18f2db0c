#include "dse/trajectory_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dse {

namespace {

double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// Signed turning angles between consecutive headings of a polyline.
std::vector<double> turning_angles(const Polyline& p) {
    std::vector<double> headings;
    headings.reserve(p.points.size());
    for (std::size_t i = 1; i < p.points.size(); ++i) {
        const auto& a = p.points[i - 1];
        const auto& b = p.points[i];
        if (a == b) continue;
        headings.push_back(std::atan2(b.y - a.y, b.x - a.x));
    }
    std::vector<double> turns;
    for (std::size_t i = 1; i < headings.size(); ++i)
        turns.push_back(wrap_angle(headings[i] - headings[i - 1]));
    return turns;
}

} // namespace

std::string to_string(NavStatus s) {
    return s == NavStatus::navigation_completed ? "navigation_completed"
                                                : "navigation_incomplete";
}

std::string to_string(QualityFlag f) {
    switch (f) {
    case QualityFlag::zig_zag: return "zig_zag";
    case QualityFlag::jitter: return "jitter";
    case QualityFlag::lane_departure_risk: return "lane_departure_risk";
    }
    return "?";
}

bool goal_reached(const Polyline& actual, Point2D goal, double tolerance_m) {
    return !actual.points.empty() && distance(actual.points.back(), goal) <= tolerance_m;
}

double deviation_score(const Polyline& actual, const Polyline& ideal, double d_norm, int m) {
    Polyline a = resample(actual, m);
    Polyline b = resample(ideal, m);
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += distance(a.points[static_cast<std::size_t>(i)],
                                                b.points[static_cast<std::size_t>(i)]);
    double mean = sum / static_cast<double>(m);
    return std::clamp(mean / d_norm, 0.0, 1.0);
}

std::set<QualityFlag> quality_flags(const Polyline& actual, const Polyline& ideal,
                                    const TrajectoryAnalyzerParams& params) {
    std::set<QualityFlag> flags;
    if (actual.points.size() < 3) return flags;

    Polyline path = resample(actual, params.resample_points);
    double length_m = arc_length(path);
    if (length_m <= 0.0) return flags;
    std::vector<double> turns = turning_angles(path);

    // Heading-sign reversals, dead band applied to suppress numeric noise.
    int reversals = 0;
    int last_sign = 0;
    double abs_turn_sum = 0.0;
    for (double t : turns) {
        abs_turn_sum += std::abs(t);
        if (std::abs(t) <= params.turn_dead_band_rad) continue;
        int sign = t > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++reversals;
        last_sign = sign;
    }
    double reversals_per_100m = reversals / (length_m / 100.0);
    if (reversals_per_100m > params.zig_zag_reversals_per_100m)
        flags.insert(QualityFlag::zig_zag);

    if (abs_turn_sum / length_m > params.jitter_rad_per_m) flags.insert(QualityFlag::jitter);

    double max_offset = 0.0;
    for (const auto& p : path.points) max_offset = std::max(max_offset, distance_to(ideal, p));
    if (max_offset > 0.5 * params.lane_width_m) flags.insert(QualityFlag::lane_departure_risk);

    return flags;
}

TrajectoryVerdict analyze(const Polyline& actual, const ScenarioSpec& s,
                          const TrajectoryAnalyzerParams& params) {
    TrajectoryVerdict v;
    Polyline ideal = ideal_trajectory(s);
    bool reached = goal_reached(actual, s.goal, params.goal_tolerance_m);
    v.status = reached ? NavStatus::navigation_completed : NavStatus::navigation_incomplete;
    if (reached) {
        double d_norm = params.deviation_norm_m > 0.0 ? params.deviation_norm_m
                                                      : bounding_box_diagonal(s.centerline);
        v.deviation_score = deviation_score(actual, ideal, d_norm, params.resample_points);
    }
    v.quality_flags = quality_flags(actual, ideal, params);

    std::ostringstream n;
    if (reached) {
        n << "Navigation Completed. The vehicle reached the goal point (normalized deviation "
             "score: "
          << *v.deviation_score << ").";
    } else {
        n << "Navigation Incomplete. The vehicle did not reach the goal point.";
    }
    if (v.quality_flags.empty()) {
        n << " The trajectory is stable and smooth and remains within lane boundaries.";
    } else {
        n << " Trajectory concerns:";
        for (const auto& f : v.quality_flags) {
            if (f == QualityFlag::zig_zag) n << " zig-zag motion;";
            if (f == QualityFlag::jitter) n << " jitter;";
            if (f == QualityFlag::lane_departure_risk) n << " lane departure risk;";
        }
    }
    v.narrative = n.str();
    return v;
}

} // namespace dse
