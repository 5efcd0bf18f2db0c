#include "dse/scenario.hpp"

#include <cmath>

#include "dse/errors.hpp"
#include "json.hpp"

namespace dse {

namespace {

using nlohmann::json;

long line_of_byte(const std::string& text, std::size_t byte) {
    long line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

Point2D parse_point(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string(field) + ": expected [x, y]");
    return Point2D{j[0].get<double>(), j[1].get<double>()};
}

} // namespace

std::string to_string(TaskKind t) {
    switch (t) {
    case TaskKind::lane_driving: return "lane_driving";
    case TaskKind::automated_valet_parking: return "automated_valet_parking";
    }
    return "?";
}

std::string ScenarioSpec::check() const {
    if (map_id.empty()) return "map_id: empty";
    if (auto why = centerline.check(); !why.empty()) return "centerline: " + why;
    if (!std::isfinite(start.x) || !std::isfinite(start.y)) return "start: non-finite";
    if (!std::isfinite(goal.x) || !std::isfinite(goal.y)) return "goal: non-finite";
    if (start == goal) return "goal: coincides with start";
    if (!(cruise_speed_kmh > 0.0)) return "cruise_speed_kmh: must be positive";
    if (cruise_speed_kmh > 300.0) return "cruise_speed_kmh: out of range";
    if (!(constraints.max_nav_time_s > 0.0)) return "max_nav_time_s: must be positive";
    if (!(constraints.min_ctrl_rate_hz > 0.0)) return "min_ctrl_rate_hz: must be positive";
    if (!(timeout_s > constraints.max_nav_time_s))
        return "timeout_s: must exceed max_nav_time_s";
    if (distance_to(centerline, start) > kSnapDistanceM)
        return "start: farther than snap distance from the centerline";
    if (distance_to(centerline, goal) > kSnapDistanceM)
        return "goal: farther than snap distance from the centerline";
    return {};
}

ScenarioSpec load_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario parse error at line " +
                          std::to_string(line_of_byte(json_text, e.byte)) + ": " + e.what());
    }
    const json& j = root.contains("scenario") ? root.at("scenario") : root;

    ScenarioSpec s;
    try {
        std::string task = j.value("task", "lane_driving");
        if (task == "lane_driving")
            s.task = TaskKind::lane_driving;
        else if (task == "automated_valet_parking")
            s.task = TaskKind::automated_valet_parking;
        else
            throw ConfigError("task: unknown value '" + task + "'");

        s.map_id = j.at("map_id").get<std::string>();
        for (const auto& pt : j.at("centerline"))
            s.centerline.points.push_back(parse_point(pt, "centerline"));
        s.start = parse_point(j.at("start"), "start");
        s.goal = parse_point(j.at("goal"), "goal");
        s.cruise_speed_kmh = j.at("cruise_speed_kmh").get<double>();
        s.constraints.max_nav_time_s = j.at("max_nav_time_s").get<double>();
        s.constraints.min_ctrl_rate_hz = j.at("min_ctrl_rate_hz").get<double>();
        s.timeout_s = j.at("timeout_s").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }

    if (auto why = s.check(); !why.empty()) throw ConfigError("scenario: " + why);
    return s;
}

Polyline ideal_trajectory(const ScenarioSpec& s) {
    Projection from = project(s.centerline, s.start);
    Projection to = project(s.centerline, s.goal);
    double total = arc_length(s.centerline);

    if (std::abs(to.arc - from.arc) < 1e-9 &&
        !(s.centerline.is_closed() && from.arc != to.arc))
        throw NoPathError("start and goal project to the same centerline point");

    if (to.arc > from.arc) return slice(s.centerline, from.arc, to.arc);

    if (!s.centerline.is_closed())
        throw NoPathError("goal projects before start on an open centerline");

    // Wrap around the loop seam.
    Polyline head = slice(s.centerline, from.arc, total);
    Polyline tail = slice(s.centerline, 0.0, to.arc);
    Polyline out = head;
    for (std::size_t i = 0; i < tail.points.size(); ++i) {
        if (i == 0 && distance(out.points.back(), tail.points[i]) <= 1e-12) continue;
        out.points.push_back(tail.points[i]);
    }
    return out;
}

} // namespace dse
