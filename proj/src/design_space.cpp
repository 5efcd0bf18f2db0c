#include "dse/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dse {

namespace {

constexpr double kFreqTolerance = 1e-9;

bool strictly_increasing_ints(const std::vector<int>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<int>()) == v.end();
}

bool strictly_increasing_doubles(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<double>()) == v.end();
}

int nearest_index_int(const std::vector<int>& axis, int value) {
    int best = 0;
    long best_dist = std::abs(static_cast<long>(axis[0]) - value);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        long d = std::abs(static_cast<long>(axis[i]) - value);
        if (d < best_dist) {
            best = static_cast<int>(i);
            best_dist = d;
        }
    }
    return best;
}

int nearest_index_double(const std::vector<double>& axis, double value) {
    int best = 0;
    double best_dist = std::abs(axis[0] - value);
    for (std::size_t i = 1; i < axis.size(); ++i) {
        double d = std::abs(axis[i] - value);
        if (d < best_dist) {
            best = static_cast<int>(i);
            best_dist = d;
        }
    }
    return best;
}

} // namespace

std::string to_string(const DesignPoint& p) {
    std::ostringstream os;
    os << "(" << p.cores << " cores, " << p.core_frequency_ghz << " GHz, " << p.lidar_hz
       << " Hz)";
    return os.str();
}

std::string DesignSpace::check() const {
    if (core_counts.empty()) return "core_counts is empty";
    if (frequencies_ghz.empty()) return "frequencies_ghz is empty";
    if (lidar_rates_hz.empty()) return "lidar_rates_hz is empty";
    if (!strictly_increasing_ints(core_counts)) return "core_counts is not strictly increasing";
    if (!strictly_increasing_doubles(frequencies_ghz))
        return "frequencies_ghz is not strictly increasing";
    if (!strictly_increasing_ints(lidar_rates_hz))
        return "lidar_rates_hz is not strictly increasing";
    if (core_counts.front() < 1) return "core_counts must be positive";
    if (frequencies_ghz.front() <= 0.0) return "frequencies_ghz must be positive";
    if (lidar_rates_hz.front() < 1) return "lidar_rates_hz must be positive";
    return {};
}

DesignPoint DesignSpace::point_at(int core_idx, int freq_idx, int lidar_idx) const {
    return DesignPoint{core_counts.at(static_cast<std::size_t>(core_idx)),
                       frequencies_ghz.at(static_cast<std::size_t>(freq_idx)),
                       lidar_rates_hz.at(static_cast<std::size_t>(lidar_idx))};
}

std::optional<std::array<int, 3>> DesignSpace::index_of(const DesignPoint& p) const {
    auto ci = std::find(core_counts.begin(), core_counts.end(), p.cores);
    if (ci == core_counts.end()) return std::nullopt;
    auto fi = std::find_if(frequencies_ghz.begin(), frequencies_ghz.end(), [&](double f) {
        return std::abs(f - p.core_frequency_ghz) <= kFreqTolerance;
    });
    if (fi == frequencies_ghz.end()) return std::nullopt;
    auto li = std::find(lidar_rates_hz.begin(), lidar_rates_hz.end(), p.lidar_hz);
    if (li == lidar_rates_hz.end()) return std::nullopt;
    return std::array<int, 3>{static_cast<int>(ci - core_counts.begin()),
                              static_cast<int>(fi - frequencies_ghz.begin()),
                              static_cast<int>(li - lidar_rates_hz.begin())};
}

DesignPoint DesignSpace::clamp(int cores, double frequency_ghz, int lidar_hz) const {
    return point_at(nearest_index_int(core_counts, cores),
                    nearest_index_double(frequencies_ghz, frequency_ghz),
                    nearest_index_int(lidar_rates_hz, lidar_hz));
}

DesignSpace DesignSpace::default_space() {
    DesignSpace s;
    s.core_counts.resize(28);
    for (int i = 0; i < 28; ++i) s.core_counts[i] = i + 1;
    s.frequencies_ghz = {1.0, 1.2, 1.5, 1.8, 2.1};
    s.lidar_rates_hz = {7, 14};
    return s;
}

std::vector<DesignPoint> enumerate(const DesignSpace& space) {
    std::vector<DesignPoint> out;
    out.reserve(space.size());
    for (int c : space.core_counts)
        for (double f : space.frequencies_ghz)
            for (int l : space.lidar_rates_hz) out.push_back(DesignPoint{c, f, l});
    return out;
}

double hardware_cost(const DesignPoint& p) {
    return static_cast<double>(p.cores) * p.core_frequency_ghz;
}

Validity validate(const DesignPoint& p, const DesignSpace& space) {
    if (std::find(space.core_counts.begin(), space.core_counts.end(), p.cores) ==
        space.core_counts.end())
        return {false, "cores"};
    bool freq_ok = std::any_of(space.frequencies_ghz.begin(), space.frequencies_ghz.end(),
                               [&](double f) {
                                   return std::abs(f - p.core_frequency_ghz) <= kFreqTolerance;
                               });
    if (!freq_ok) return {false, "frequency"};
    if (std::find(space.lidar_rates_hz.begin(), space.lidar_rates_hz.end(), p.lidar_hz) ==
        space.lidar_rates_hz.end())
        return {false, "lidar"};
    return {true, {}};
}

bool is_feasible(const Metrics& m, const Constraints& c) {
    return m.goal_reached && m.nav_time_s <= c.max_nav_time_s &&
           m.ctrl_rate_hz > c.min_ctrl_rate_hz;
}

} // namespace dse
