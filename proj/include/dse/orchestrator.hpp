#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dse/design_space.hpp"
#include "dse/memory_record.hpp"
#include "dse/pareto.hpp"
#include "dse/scenario.hpp"
#include "dse/search.hpp"
#include "dse/vehicle_model.hpp"

namespace dse {

// One executor instruction. Hardware settings must take effect before the
// task launches, and profiling brackets the task.
struct CommandStep {
    enum class Kind {
        set_cores,
        set_frequency,
        set_lidar_rate,
        start_profiling,
        launch_task,
        stop_profiling,
        collect_outputs,
    };
    Kind kind = Kind::collect_outputs;
    double value = 0.0;    // setter payload
    std::string argument;  // launch_task payload (map/task id)

    bool operator==(const CommandStep&) const = default;
};

std::string to_string(CommandStep::Kind k);

struct CommandPlan {
    std::vector<CommandStep> steps;

    bool operator==(const CommandPlan&) const = default;

    // Empty string when the step ordering invariants hold.
    std::string check() const;
};

CommandPlan build_command_plan(const DesignPoint& p, const ScenarioSpec& s);

// One step per line, "<kind> <payload>"; parse/serialize round-trip exactly.
std::string to_text(const CommandPlan& plan);
CommandPlan plan_from_text(const std::string& text);

// The design point encoded in a plan's setter steps.
DesignPoint point_from_plan(const CommandPlan& plan);

// Boundary to whatever actually evaluates a design point.
class Executor {
public:
    virtual ~Executor() = default;
    virtual std::string name() const = 0;
    virtual SimulationOutput run(const CommandPlan& plan, const ScenarioSpec& s,
                                 std::uint64_t seed) = 0;
};

// The bundled implementation: the synthetic vehicle model.
class SyntheticExecutor : public Executor {
public:
    explicit SyntheticExecutor(VehicleModel model) : model_(std::move(model)) {}
    std::string name() const override { return "synthetic"; }
    SimulationOutput run(const CommandPlan& plan, const ScenarioSpec& s,
                         std::uint64_t seed) override;

private:
    VehicleModel model_;
};

// Marks the boundary to a real simulator / driving stack / profiler
// toolchain, where each plan step would be shelled out through the three
// connector scripts. Declared but not implemented here.
class ExternalExecutor : public Executor {
public:
    explicit ExternalExecutor(std::string connector_dir)
        : connector_dir_(std::move(connector_dir)) {}
    std::string name() const override { return "external"; }
    SimulationOutput run(const CommandPlan&, const ScenarioSpec&, std::uint64_t) override;

private:
    std::string connector_dir_;
};

// Curated few-shot subset: cost extremes, nav-time extremes (fastest
// feasible, slowest overall) plus the k most recent records, deduplicated,
// capped at 6, ordered by iteration.
std::vector<MemoryRecord> select_references(const History& memory, int k_recent,
                                            const Constraints& constraints);

// Merges the trace report and trajectory verdict into the combined
// performance report: metrics sentence, visual findings, structured JSON.
CombinedReport combined_report(const PerformanceReport& perf, const TrajectoryVerdict& verdict,
                               const Metrics& metrics);

enum class TerminationCause { budget, strategy, exhausted };

std::string to_string(TerminationCause c);

struct ExplorationResult {
    History records;
    std::vector<MemoryRecord> feasible;
    std::vector<MemoryRecord> pareto_found;
    std::optional<MemoryRecord> best;  // cheapest on the found front
    int iterations_used = 0;
    TerminationCause terminated_by = TerminationCause::budget;
    double wall_clock_s = 0.0;                // labeled wall-clock field
    std::optional<std::string> abort_reason;  // set when the executor failed
};

struct ExplorationSetup {
    ScenarioSpec scenario;
    DesignSpace space;
    int budget = 1;
    std::uint64_t seed = 0;
    TrajectoryAnalyzerParams analyzer;
};

struct RunOptions {
    // When set, the run directory is populated: memory.jsonl, reports/iter_N.json,
    // result.json.
    std::string output_dir;
    // Called once per (iteration, phase); the phase sequence is fixed:
    // propose, plan, execute, decipher, record.
    std::function<void(int, const std::string&)> phase_observer;
};

// The round-robin loop: propose -> plan -> execute -> decipher -> record,
// at most `budget` evaluations. Re-proposed points are served from the
// evaluation cache without consuming budget. Deterministic given
// (setup, strategy, executor, seed).
ExplorationResult run_exploration(Strategy& strategy, Executor& executor,
                                  const ExplorationSetup& setup,
                                  const RunOptions& options = {});

// Serialization used for the run directory; stable field order.
std::string record_to_json(const MemoryRecord& r);
std::string result_to_json(const ExplorationResult& r, int indent = 2);

} // namespace dse
