#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dse {

// One hardware/software configuration: the unit of exploration.
struct DesignPoint {
    int cores = 0;
    double core_frequency_ghz = 0.0;
    int lidar_hz = 0;

    // Lexicographic on (cores, frequency, lidar) so points can be ordered
    // and deduplicated.
    auto operator<=>(const DesignPoint&) const = default;
};

std::string to_string(const DesignPoint& p);

// The three configuration axes. Each axis is a non-empty, strictly
// increasing, duplicate-free list.
struct DesignSpace {
    std::vector<int> core_counts;
    std::vector<double> frequencies_ghz;
    std::vector<int> lidar_rates_hz;

    bool operator==(const DesignSpace&) const = default;

    // Empty string when valid, otherwise the reason.
    std::string check() const;

    std::size_t size() const {
        return core_counts.size() * frequencies_ghz.size() * lidar_rates_hz.size();
    }

    std::array<int, 3> axis_sizes() const {
        return {static_cast<int>(core_counts.size()),
                static_cast<int>(frequencies_ghz.size()),
                static_cast<int>(lidar_rates_hz.size())};
    }

    DesignPoint point_at(int core_idx, int freq_idx, int lidar_idx) const;
    DesignPoint point_at(const std::array<int, 3>& idx) const {
        return point_at(idx[0], idx[1], idx[2]);
    }

    // Axis indices of a member point; nullopt when any field is not a member.
    std::optional<std::array<int, 3>> index_of(const DesignPoint& p) const;

    // Member point nearest to the given raw values (ties resolved toward the
    // lower member). Used to clamp free-form proposals onto the axes.
    DesignPoint clamp(int cores, double frequency_ghz, int lidar_hz) const;

    // The Fig.-3-shaped default: cores 1..28, five frequency steps, two
    // LiDAR rates.
    static DesignSpace default_space();
};

// Per-evaluation outcomes for one design point.
struct Metrics {
    double nav_time_s = 0.0;                   // T_Nav; holds the timeout value when !goal_reached
    std::optional<double> deviation_score;     // S_Dev in [0,1]; absent when !goal_reached
    double ctrl_rate_hz = 0.0;                 // Ctrl_freq
    double hw_cost = 0.0;                      // C_HW
    bool goal_reached = false;

    bool operator==(const Metrics&) const = default;
};

// Application constraints: time limit and minimum control rate.
struct Constraints {
    double max_nav_time_s = 0.0;
    double min_ctrl_rate_hz = 0.0;

    bool operator==(const Constraints&) const = default;
};

// Full Cartesian product in deterministic lexicographic order
// (cores outermost, LiDAR innermost).
std::vector<DesignPoint> enumerate(const DesignSpace& space);

// C_HW = N_cores x f_core. The LiDAR rate does not change the computational
// capability of the platform, so it does not enter the cost.
double hardware_cost(const DesignPoint& p);

// Membership verdict; names the offending field on failure.
struct Validity {
    bool ok = false;
    std::string field;  // "cores" | "frequency" | "lidar" when !ok
};

Validity validate(const DesignPoint& p, const DesignSpace& space);

// goal reached, nav time within the limit, and control rate strictly above
// the minimum ("larger than one Hz").
bool is_feasible(const Metrics& m, const Constraints& c);

} // namespace dse
