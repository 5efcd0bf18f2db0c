#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dse/design_space.hpp"
#include "dse/geometry.hpp"
#include "dse/scenario.hpp"
#include "dse/trace_analysis.hpp"
#include "dse/trajectory_analysis.hpp"

namespace dse {

inline constexpr int kStageCount = 5;

// Fixed stage order: sensing, localization, perception, planning, control.
struct PipelineStage {
    std::string name;
    double workload_gcycles = 0.0;   // per frame
    double parallel_fraction = 0.0;  // Amdahl fraction in [0, 1]
};

// Frozen model constants; committed to the repo as data
// (configs/pipeline_calibration.json), not hard-coded.
struct PipelineCalibration {
    std::array<PipelineStage, kStageCount> stages;
    double coordination_overhead_per_core = 0.0;  // kappa in E(n) = 1/(1 + kappa*(n-1))
    double frequency_stall_per_ghz = 0.0;         // mu in M(f) = 1/(1 + mu*(f-1)): memory
                                                  // stalls do not scale with the clock
    double ctrl_ref_hz = 8.0;                     // control rate at which v_eff saturates
    double stability_cutoff_hz = 0.5;             // below this the run always times out
    double jitter_gain_m_hz = 0.5;                // a0: amplitude = min(a_max, a0/ctrl)
    double jitter_max_m = 2.0;
    double jitter_wavelength_m = 25.0;

    // Empty string when valid, otherwise the reason.
    std::string check() const;

    static PipelineCalibration from_json(const std::string& json_text);
    static PipelineCalibration from_file(const std::string& path);
};

double amdahl_speedup(int cores, double parallel_fraction);

struct StageRate {
    double processing_time_s = 0.0;
    double output_rate_hz = 0.0;
};

// Per-stage processing time w_i / (speedup_i * f) and the rate cascade
// x_0 = min(lidar, 1/t_0), x_i = min(x_{i-1}, 1/t_i).
std::array<StageRate, kStageCount> stage_rates(const DesignPoint& p,
                                               const PipelineCalibration& cal);

// The cascade above plus an aggregate-capacity bound: demanded work
// U = sum_i w_i * x_i may not exceed G = n * f * E(n); when it would, every
// stage is throttled by beta = G/U. The pure cascade alone cannot spread
// control rates widely enough across the space (its best-case ratio between
// two configurations is capped by the per-stage Amdahl ratio), so the
// capacity term carries the aggregate scaling.
struct EffectiveRates {
    std::array<double, kStageCount> topic_rates_hz{};  // beta * x_i
    std::array<double, kStageCount> processing_time_s{};
    double utilization_ghz = 0.0;  // U
    double capacity_ghz = 0.0;     // G
    double scale = 1.0;            // beta
    double ctrl_rate_hz = 0.0;     // final-stage effective rate
};

EffectiveRates effective_rates(const DesignPoint& p, const PipelineCalibration& cal);

// Trace output of one run plus the driven path.
struct SimulationOutput {
    std::vector<TraceEvent> trace;
    Polyline actual_trajectory;
    bool completed = false;
    double wall_time_s = 0.0;  // simulated
};

// Fixed topic names of the synthetic pipeline, in stage order.
const std::array<std::string, kStageCount>& stage_topics();

// node -> subscribed topics for the synthetic pipeline.
NodeInputs synthetic_topology();

// Deterministic synthetic stand-in for the co-simulated vehicle: maps a
// design point, scenario and seed to a trace log, an actual trajectory and
// a completion flag. The seed only affects jitter phase and sub-frame
// timestamp dither, never rates or completion.
class VehicleModel {
public:
    explicit VehicleModel(PipelineCalibration cal);

    const PipelineCalibration& calibration() const { return calibration_; }

    SimulationOutput simulate(const DesignPoint& p, const ScenarioSpec& s,
                              std::uint64_t seed) const;

private:
    PipelineCalibration calibration_;
};

// One fully analyzed evaluation.
struct Evaluation {
    Metrics metrics;
    PerformanceReport report;
    TrajectoryVerdict verdict;
};

// Runs the deciphering pipeline (trace report + trajectory verdict) over a
// simulation output and assembles the metrics record.
Evaluation analyze_output(const SimulationOutput& out, const DesignPoint& p,
                          const ScenarioSpec& s,
                          const TrajectoryAnalyzerParams& params = {});

// Every enumerated point evaluated through simulate + the analysis modules,
// in enumeration order. ground_truth runs the points in parallel (OpenMP)
// and must produce output identical to ground_truth_serial.
std::vector<std::pair<DesignPoint, Metrics>> ground_truth(const VehicleModel& model,
                                                          const DesignSpace& space,
                                                          const ScenarioSpec& s,
                                                          std::uint64_t seed);
std::vector<std::pair<DesignPoint, Metrics>> ground_truth_serial(const VehicleModel& model,
                                                                 const DesignSpace& space,
                                                                 const ScenarioSpec& s,
                                                                 std::uint64_t seed);

} // namespace dse
