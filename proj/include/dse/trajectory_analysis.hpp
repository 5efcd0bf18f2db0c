#pragma once

#include <optional>
#include <set>
#include <string>

#include "dse/geometry.hpp"
#include "dse/scenario.hpp"

namespace dse {

enum class NavStatus { navigation_completed, navigation_incomplete };

enum class QualityFlag { zig_zag, jitter, lane_departure_risk };

std::string to_string(NavStatus s);
std::string to_string(QualityFlag f);

// Geometric stand-in for the visual analysis: goal verdict, normalized
// deviation score and qualitative flags.
struct TrajectoryVerdict {
    NavStatus status = NavStatus::navigation_incomplete;
    std::optional<double> deviation_score;  // present iff completed
    std::set<QualityFlag> quality_flags;
    std::string narrative;

    bool operator==(const TrajectoryVerdict&) const = default;
};

struct TrajectoryAnalyzerParams {
    int resample_points = 256;
    double goal_tolerance_m = 2.0;
    double lane_width_m = 4.0;
    double zig_zag_reversals_per_100m = 4.0;  // R_zz
    double jitter_rad_per_m = 0.15;           // J
    double turn_dead_band_rad = 0.01;
    // Normalizer for the deviation score; <= 0 means "use the diagonal of
    // the centerline bounding box".
    double deviation_norm_m = 0.0;
};

// Euclidean distance from the last trajectory point to the goal, inclusive
// tolerance.
bool goal_reached(const Polyline& actual, Point2D goal, double tolerance_m);

// Both polylines resampled to `m` points uniform in arc length; the mean
// pointwise distance divided by d_norm, clamped to [0, 1].
double deviation_score(const Polyline& actual, const Polyline& ideal, double d_norm,
                       int m = 256);

// zig_zag: heading-sign reversals per 100 m above R_zz;
// jitter: mean |heading change| per meter above J;
// lane_departure_risk: max distance from the ideal path above half the lane
// width. Reversals are counted on the resampled polyline with a dead band
// to suppress numeric noise.
std::set<QualityFlag> quality_flags(const Polyline& actual, const Polyline& ideal,
                                    const TrajectoryAnalyzerParams& params = {});

// Composes the three analyses against the scenario's goal and ideal
// trajectory and templates a short narrative.
TrajectoryVerdict analyze(const Polyline& actual, const ScenarioSpec& s,
                          const TrajectoryAnalyzerParams& params = {});

} // namespace dse
