#include "dse/vehicle_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dse/errors.hpp"
#include "dse/rng.hpp"
#include "json.hpp"

namespace dse {

namespace {

constexpr std::array<const char*, kStageCount> kStageNames = {
    "sensing", "localization", "perception", "planning", "control"};

constexpr double kDitherMaxS = 1e-3;  // +-1 ms on interior timestamps

std::uint64_t point_salt(const DesignPoint& p) {
    std::uint64_t bits;
    double f = p.core_frequency_ghz;
    static_assert(sizeof(bits) == sizeof(f));
    std::memcpy(&bits, &f, sizeof(bits));
    return (static_cast<std::uint64_t>(p.cores) << 32) ^ bits ^
           (static_cast<std::uint64_t>(p.lidar_hz) << 17);
}

std::int64_t to_ns(double seconds) {
    return std::llround(seconds * 1e9);
}

// Publish/callback grids: endpoints exact so the (count-1)/span estimator
// recovers the rate; interior events dithered within +-amplitude.
std::vector<std::int64_t> event_grid(double rate_hz, double duration_s, double dither_s,
                                     Rng& rng) {
    std::vector<std::int64_t> ts;
    if (rate_hz <= 0.0 || duration_s <= 0.0) return ts;
    auto count = static_cast<std::size_t>(std::floor(rate_hz * duration_s)) + 1;
    ts.reserve(count);
    std::uniform_real_distribution<double> dither(-dither_s, dither_s);
    for (std::size_t k = 0; k < count; ++k) {
        double t = static_cast<double>(k) / rate_hz;
        if (k > 0 && k + 1 < count && dither_s > 0.0) t += dither(rng);
        ts.push_back(to_ns(t));
    }
    return ts;
}

} // namespace

std::string PipelineCalibration::check() const {
    for (int i = 0; i < kStageCount; ++i) {
        const auto& st = stages[static_cast<std::size_t>(i)];
        if (st.name != kStageNames[static_cast<std::size_t>(i)])
            return "stage " + std::to_string(i) + ": expected name '" +
                   kStageNames[static_cast<std::size_t>(i)] + "'";
        if (!(st.workload_gcycles > 0.0))
            return "stage " + st.name + ": workload must be positive";
        if (st.parallel_fraction < 0.0 || st.parallel_fraction > 1.0)
            return "stage " + st.name + ": parallel fraction out of [0,1]";
    }
    if (coordination_overhead_per_core < 0.0) return "coordination overhead must be >= 0";
    if (frequency_stall_per_ghz < 0.0 || frequency_stall_per_ghz >= 1.0)
        return "frequency stall must be in [0, 1)";
    if (!(ctrl_ref_hz > 0.0)) return "ctrl_ref_hz must be positive";
    if (stability_cutoff_hz < 0.0) return "stability cutoff must be >= 0";
    if (jitter_gain_m_hz < 0.0 || jitter_max_m < 0.0) return "jitter constants must be >= 0";
    if (!(jitter_wavelength_m > 0.0)) return "jitter wavelength must be positive";
    return {};
}

PipelineCalibration PipelineCalibration::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("calibration parse error: ") + e.what());
    }
    PipelineCalibration cal;
    try {
        const auto& stages = j.at("stages");
        if (stages.size() != kStageCount)
            throw ConfigError("calibration: expected " + std::to_string(kStageCount) +
                              " stages");
        for (std::size_t i = 0; i < kStageCount; ++i) {
            cal.stages[i].name = stages[i].at("name").get<std::string>();
            cal.stages[i].workload_gcycles = stages[i].at("workload_gcycles").get<double>();
            cal.stages[i].parallel_fraction = stages[i].at("parallel_fraction").get<double>();
        }
        cal.coordination_overhead_per_core = j.at("coordination_overhead_per_core").get<double>();
        cal.frequency_stall_per_ghz = j.at("frequency_stall_per_ghz").get<double>();
        cal.ctrl_ref_hz = j.at("ctrl_ref_hz").get<double>();
        cal.stability_cutoff_hz = j.at("stability_cutoff_hz").get<double>();
        cal.jitter_gain_m_hz = j.at("jitter_gain_m_hz").get<double>();
        cal.jitter_max_m = j.at("jitter_max_m").get<double>();
        cal.jitter_wavelength_m = j.at("jitter_wavelength_m").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("calibration: ") + e.what());
    }
    if (auto why = cal.check(); !why.empty()) throw ConfigError("calibration: " + why);
    return cal;
}

PipelineCalibration PipelineCalibration::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open calibration file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

double amdahl_speedup(int cores, double parallel_fraction) {
    return 1.0 / ((1.0 - parallel_fraction) + parallel_fraction / static_cast<double>(cores));
}

std::array<StageRate, kStageCount> stage_rates(const DesignPoint& p,
                                               const PipelineCalibration& cal) {
    std::array<StageRate, kStageCount> out;
    double upstream = static_cast<double>(p.lidar_hz);
    for (std::size_t i = 0; i < kStageCount; ++i) {
        const auto& st = cal.stages[i];
        double speedup = amdahl_speedup(p.cores, st.parallel_fraction);
        double t = st.workload_gcycles / (speedup * p.core_frequency_ghz);
        out[i].processing_time_s = t;
        out[i].output_rate_hz = std::min(upstream, 1.0 / t);
        upstream = out[i].output_rate_hz;
    }
    return out;
}

EffectiveRates effective_rates(const DesignPoint& p, const PipelineCalibration& cal) {
    EffectiveRates er;
    auto rates = stage_rates(p, cal);
    for (std::size_t i = 0; i < kStageCount; ++i) {
        er.processing_time_s[i] = rates[i].processing_time_s;
        // The sensing driver pays per arriving packet at the configured
        // LiDAR rate whether or not the frame is published; downstream
        // stages pay at their achieved rates.
        double demand_rate = i == 0 ? static_cast<double>(p.lidar_hz)
                                    : rates[i].output_rate_hz;
        er.utilization_ghz += cal.stages[i].workload_gcycles * demand_rate;
    }
    double core_efficiency =
        1.0 / (1.0 + cal.coordination_overhead_per_core * static_cast<double>(p.cores - 1));
    double clock_efficiency =
        1.0 / (1.0 + cal.frequency_stall_per_ghz *
                         std::max(0.0, p.core_frequency_ghz - 1.0));
    er.capacity_ghz = static_cast<double>(p.cores) * p.core_frequency_ghz *
                      core_efficiency * clock_efficiency;
    er.scale = er.utilization_ghz > 0.0 ? std::min(1.0, er.capacity_ghz / er.utilization_ghz)
                                        : 1.0;
    for (std::size_t i = 0; i < kStageCount; ++i)
        er.topic_rates_hz[i] = er.scale * rates[i].output_rate_hz;
    er.ctrl_rate_hz = er.topic_rates_hz[kStageCount - 1];
    return er;
}

const std::array<std::string, kStageCount>& stage_topics() {
    static const std::array<std::string, kStageCount> topics = {
        "/sensing/lidar/points", "/localization/pose", "/perception/objects",
        "/planning/trajectory", "/control/command/control_cmd"};
    return topics;
}

NodeInputs synthetic_topology() {
    const auto& t = stage_topics();
    return NodeInputs{
        {"localization", {t[0]}},
        {"perception", {t[0], t[1]}},
        {"planning", {t[1], t[2]}},
        {"control", {t[3]}},
    };
}

VehicleModel::VehicleModel(PipelineCalibration cal) : calibration_(std::move(cal)) {
    if (auto why = calibration_.check(); !why.empty()) throw ConfigError(why);
}

SimulationOutput VehicleModel::simulate(const DesignPoint& p, const ScenarioSpec& s,
                                        std::uint64_t seed) const {
    const auto& cal = calibration_;
    EffectiveRates er = effective_rates(p, cal);
    double ctrl = er.ctrl_rate_hz;

    Polyline route = ideal_trajectory(s);
    double route_len = arc_length(route);
    double cruise_ms = s.cruise_speed_kmh / 3.6;
    double v_eff = cruise_ms * std::min(1.0, ctrl / cal.ctrl_ref_hz);
    double full_time_s = v_eff > 0.0 ? route_len / v_eff
                                     : std::numeric_limits<double>::infinity();

    SimulationOutput out;
    out.completed = ctrl >= cal.stability_cutoff_hz && full_time_s <= s.timeout_s;
    double run_time_s = out.completed ? full_time_s : s.timeout_s;
    out.wall_time_s = run_time_s;

    // ---- trace ----
    std::uint64_t salt = point_salt(p);
    Rng dither_rng = make_substream(seed, "dither", salt);
    const auto& topics = stage_topics();
    auto topology = synthetic_topology();

    std::vector<TraceEvent> trace;
    trace.push_back(TraceEvent{0, EventKind::nav_start, "mission", 900, ""});
    if (out.completed)
        trace.push_back(
            TraceEvent{to_ns(full_time_s), EventKind::nav_goal_reached, "mission", 900, ""});

    for (std::size_t i = 0; i < kStageCount; ++i) {
        for (std::int64_t t : event_grid(er.topic_rates_hz[i], run_time_s, kDitherMaxS,
                                         dither_rng))
            trace.push_back(TraceEvent{t, EventKind::publish, kStageNames[i], 101 + static_cast<int>(i),
                                       topics[i]});
    }

    // Subscriber callbacks: a node consumes each input topic at
    // min(topic rate, its own throttled service rate). Callback duration is
    // the stage processing time; the dither amplitude is clamped so
    // consecutive callbacks never overlap.
    for (std::size_t i = 0; i < kStageCount; ++i) {
        auto inputs = topology.find(kStageNames[i]);
        if (inputs == topology.end()) continue;
        double service = er.scale / er.processing_time_s[i];
        for (const auto& topic : inputs->second) {
            auto idx = static_cast<std::size_t>(
                std::find(topics.begin(), topics.end(), topic) - topics.begin());
            double cb_rate = std::min(er.topic_rates_hz[idx], service);
            if (cb_rate <= 0.0) continue;
            double gap = 1.0 / cb_rate - er.processing_time_s[i];
            double dither = std::clamp(0.45 * gap, 0.0, kDitherMaxS);
            std::int64_t duration_ns = to_ns(er.processing_time_s[i]);
            for (std::int64_t t : event_grid(cb_rate, run_time_s, dither, dither_rng)) {
                trace.push_back(TraceEvent{t, EventKind::subscribe_callback_start,
                                           kStageNames[i], 101 + static_cast<int>(i), topic});
                trace.push_back(TraceEvent{t + duration_ns, EventKind::subscribe_callback_end,
                                           kStageNames[i], 101 + static_cast<int>(i), topic});
            }
        }
    }

    std::stable_sort(trace.begin(), trace.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.t_ns < b.t_ns; });
    out.trace = std::move(trace);

    // ---- trajectory ----
    double fraction = out.completed ? 1.0 : std::min(1.0, s.timeout_s / full_time_s);
    // A run killed by the stability cutoff alone must still end short of the
    // goal: the stack is deemed unable to track the path.
    if (!out.completed && ctrl < cal.stability_cutoff_hz) fraction = std::min(fraction, 0.9);
    double driven_len = route_len * fraction;

    double amplitude = ctrl > 0.0 ? std::min(cal.jitter_max_m, cal.jitter_gain_m_hz / ctrl)
                                  : cal.jitter_max_m;
    Rng jitter_rng = make_substream(seed, "jitter", salt);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
    double phase = phase_dist(jitter_rng);

    Polyline traj;
    traj.points.push_back(s.start);  // first point is the start position, exactly
    const double sample_step_m = 1.0;
    const double taper_m = 10.0;  // jitter fades at the route ends
    auto sample_count = static_cast<std::size_t>(std::floor(driven_len / sample_step_m));
    for (std::size_t j = 0; j <= sample_count + 1; ++j) {
        double arc = std::min(static_cast<double>(j) * sample_step_m, driven_len);
        Point2D base = point_at_arc(route, arc);
        double envelope =
            std::clamp(std::min(arc, route_len - arc) / taper_m, 0.0, 1.0);
        double offset = amplitude * envelope *
                        std::sin(2.0 * std::numbers::pi * arc / cal.jitter_wavelength_m + phase);
        Point2D tangent = tangent_at_arc(route, arc);
        Point2D pt{base.x - offset * tangent.y, base.y + offset * tangent.x};
        if (distance(traj.points.back(), pt) > 1e-12) traj.points.push_back(pt);
        if (arc >= driven_len) break;
    }
    out.actual_trajectory = std::move(traj);
    return out;
}

Evaluation analyze_output(const SimulationOutput& out, const DesignPoint& p,
                          const ScenarioSpec& s, const TrajectoryAnalyzerParams& params) {
    Evaluation ev;
    ev.report = build_report(out.trace, synthetic_topology());
    ev.verdict = analyze(out.actual_trajectory, s, params);
    ev.metrics.ctrl_rate_hz = ev.report.ctrl_rate_hz;
    ev.metrics.nav_time_s = ev.report.nav_time_s.value_or(s.timeout_s);
    ev.metrics.goal_reached = ev.verdict.status == NavStatus::navigation_completed;
    ev.metrics.deviation_score = ev.verdict.deviation_score;
    ev.metrics.hw_cost = hardware_cost(p);
    return ev;
}

std::vector<std::pair<DesignPoint, Metrics>> ground_truth_serial(const VehicleModel& model,
                                                                 const DesignSpace& space,
                                                                 const ScenarioSpec& s,
                                                                 std::uint64_t seed) {
    auto points = enumerate(space);
    std::vector<std::pair<DesignPoint, Metrics>> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto sim = model.simulate(points[i], s, seed);
        out[i] = {points[i], analyze_output(sim, points[i], s).metrics};
    }
    return out;
}

std::vector<std::pair<DesignPoint, Metrics>> ground_truth(const VehicleModel& model,
                                                          const DesignSpace& space,
                                                          const ScenarioSpec& s,
                                                          std::uint64_t seed) {
    auto points = enumerate(space);
    std::vector<std::pair<DesignPoint, Metrics>> out(points.size());
    // Results land at their enumeration index, so assembly order does not
    // depend on scheduling.
    #pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(points.size()); ++i) {
        auto idx = static_cast<std::size_t>(i);
        auto sim = model.simulate(points[idx], s, seed);
        out[idx] = {points[idx], analyze_output(sim, points[idx], s).metrics};
    }
    return out;
}

} // namespace dse
