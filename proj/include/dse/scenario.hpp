#pragma once

#include <string>

#include "dse/design_space.hpp"
#include "dse/geometry.hpp"

namespace dse {

enum class TaskKind { lane_driving, automated_valet_parking };

std::string to_string(TaskKind t);

// Task definition: the map's lane centerline, start/goal positions, cruise
// speed and the application constraints. Start and goal must lie within
// kSnapDistance of the centerline.
struct ScenarioSpec {
    TaskKind task = TaskKind::lane_driving;
    std::string map_id;
    Polyline centerline;
    Point2D start;
    Point2D goal;
    double cruise_speed_kmh = 0.0;
    Constraints constraints;
    double timeout_s = 0.0;

    static constexpr double kSnapDistanceM = 2.0;

    // Empty string when valid, otherwise "<field>: <reason>".
    std::string check() const;
};

// Parses and validates a scenario from JSON text (either a bare scenario
// object or a config file with a "scenario" section). Throws ConfigError
// with line context on syntax errors and with the field name on validation
// errors.
ScenarioSpec load_scenario(const std::string& json_text);

// Reference path under ideal conditions: the centerline clipped between the
// projections of start and goal, endpoints snapped onto the line. On a
// closed-loop centerline the path may wrap around the seam; on an open one
// a goal that projects before the start raises NoPathError.
Polyline ideal_trajectory(const ScenarioSpec& s);

} // namespace dse
