#pragma once

#include <map>
#include <string>
#include <vector>

#include "dse/design_space.hpp"

namespace dse {

// One evaluation projected onto the two minimized objectives.
struct ObjectivePoint {
    double nav_time_s = 0.0;
    double hw_cost = 0.0;
    DesignPoint source;

    bool operator==(const ObjectivePoint&) const = default;
};

// a dominates b iff a <= b on both objectives and < on at least one.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

// Exactly the non-dominated points under (min nav, min cost). Points equal
// on both axes are mutually non-dominating and all retained. Output order
// follows the input order.
std::vector<ObjectivePoint> pareto_front(const std::vector<ObjectivePoint>& points);

// Count of distinct found sources that appear among the truth front's
// sources. Comparison is by design-point identity, not objective equality.
int front_hits(const std::vector<ObjectivePoint>& found,
               const std::vector<ObjectivePoint>& truth_front);

// CSV with one row per evaluation:
// cores,freq_ghz,lidar_hz,nav_time_s,hw_cost,feasible,on_truth_front,found_by
std::string emit_plot_data(const std::vector<std::pair<DesignPoint, Metrics>>& evaluations,
                           const std::vector<ObjectivePoint>& truth_front,
                           const std::map<DesignPoint, std::string>& found_by,
                           const Constraints& constraints);

} // namespace dse
