#include "dse/pareto.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace dse {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
    return a.nav_time_s <= b.nav_time_s && a.hw_cost <= b.hw_cost &&
           (a.nav_time_s < b.nav_time_s || a.hw_cost < b.hw_cost);
}

std::vector<ObjectivePoint> pareto_front(const std::vector<ObjectivePoint>& points) {
    // Sort-and-sweep over (nav, cost); O(n log n) against the O(n^2) oracle
    // the tests carry.
    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].nav_time_s != points[b].nav_time_s)
            return points[a].nav_time_s < points[b].nav_time_s;
        return points[a].hw_cost < points[b].hw_cost;
    });

    std::vector<bool> keep(n, false);
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < n) {
        // Group of equal nav time: only its cheapest cost survives, and only
        // if it strictly improves on every earlier (faster) point.
        std::size_t j = i;
        double group_min = points[order[i]].hw_cost;
        while (j < n && points[order[j]].nav_time_s == points[order[i]].nav_time_s) {
            group_min = std::min(group_min, points[order[j]].hw_cost);
            ++j;
        }
        if (group_min < best_cost) {
            for (std::size_t k = i; k < j; ++k)
                if (points[order[k]].hw_cost == group_min) keep[order[k]] = true;
            best_cost = group_min;
        }
        i = j;
    }

    std::vector<ObjectivePoint> front;
    for (std::size_t k = 0; k < n; ++k)
        if (keep[k]) front.push_back(points[k]);
    return front;
}

int front_hits(const std::vector<ObjectivePoint>& found,
               const std::vector<ObjectivePoint>& truth_front) {
    std::set<DesignPoint> truth_sources;
    for (const auto& p : truth_front) truth_sources.insert(p.source);
    std::set<DesignPoint> hit;
    for (const auto& p : found)
        if (truth_sources.count(p.source)) hit.insert(p.source);
    return static_cast<int>(hit.size());
}

std::string emit_plot_data(const std::vector<std::pair<DesignPoint, Metrics>>& evaluations,
                           const std::vector<ObjectivePoint>& truth_front,
                           const std::map<DesignPoint, std::string>& found_by,
                           const Constraints& constraints) {
    std::set<DesignPoint> front_sources;
    for (const auto& p : truth_front) front_sources.insert(p.source);

    std::ostringstream csv;
    csv << "cores,freq_ghz,lidar_hz,nav_time_s,hw_cost,feasible,on_truth_front,found_by\n";
    for (const auto& [point, metrics] : evaluations) {
        auto it = found_by.find(point);
        csv << point.cores << ',' << point.core_frequency_ghz << ',' << point.lidar_hz << ','
            << metrics.nav_time_s << ',' << metrics.hw_cost << ','
            << (is_feasible(metrics, constraints) ? "true" : "false") << ','
            << (front_sources.count(point) ? "true" : "false") << ','
            << (it == found_by.end() ? "" : it->second) << '\n';
    }
    return csv.str();
}

} // namespace dse
