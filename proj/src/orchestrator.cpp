#include "dse/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "dse/errors.hpp"
#include "dse/rng.hpp"
#include "json.hpp"

namespace dse {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << content;
    }
    fs::rename(tmp, path);
}

ordered_json point_json(const DesignPoint& p) {
    return ordered_json{{"cores", p.cores},
                        {"core_frequency_ghz", p.core_frequency_ghz},
                        {"lidar_hz", p.lidar_hz}};
}

ordered_json metrics_json(const Metrics& m) {
    ordered_json j;
    j["nav_time_s"] = m.nav_time_s;
    if (m.deviation_score)
        j["deviation_score"] = *m.deviation_score;
    else
        j["deviation_score"] = nullptr;
    j["ctrl_rate_hz"] = m.ctrl_rate_hz;
    j["hw_cost"] = m.hw_cost;
    j["goal_reached"] = m.goal_reached;
    return j;
}

ordered_json record_json(const MemoryRecord& r) {
    ordered_json j;
    j["iteration"] = r.iteration;
    j["point"] = point_json(r.point);
    j["metrics"] = metrics_json(r.metrics);
    ordered_json flags = ordered_json::array();
    for (const auto& f : r.bottleneck_flags) flags.push_back(to_string(f));
    j["bottleneck_flags"] = flags;
    j["verdict_status"] = to_string(r.verdict_status);
    j["verdict_narrative"] = r.verdict_narrative;
    j["rationale"] = r.rationale;
    return j;
}

} // namespace

std::string to_string(CommandStep::Kind k) {
    switch (k) {
    case CommandStep::Kind::set_cores: return "set_cores";
    case CommandStep::Kind::set_frequency: return "set_frequency";
    case CommandStep::Kind::set_lidar_rate: return "set_lidar_rate";
    case CommandStep::Kind::start_profiling: return "start_profiling";
    case CommandStep::Kind::launch_task: return "launch_task";
    case CommandStep::Kind::stop_profiling: return "stop_profiling";
    case CommandStep::Kind::collect_outputs: return "collect_outputs";
    }
    return "?";
}

std::string CommandPlan::check() const {
    auto position = [&](CommandStep::Kind k) -> int {
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i].kind == k) return static_cast<int>(i);
        return -1;
    };
    int launch = position(CommandStep::Kind::launch_task);
    if (launch < 0) return "plan has no launch_task step";
    for (const auto& kind :
         {CommandStep::Kind::set_cores, CommandStep::Kind::set_frequency,
          CommandStep::Kind::set_lidar_rate}) {
        int p = position(kind);
        if (p < 0) return "plan misses a hardware/software setting step";
        if (p > launch) return "hardware settings must precede launch_task";
    }
    int start = position(CommandStep::Kind::start_profiling);
    int stop = position(CommandStep::Kind::stop_profiling);
    if (start < 0 || start > launch) return "start_profiling must precede launch_task";
    if (stop < 0 || stop < launch) return "stop_profiling must follow launch_task";
    return {};
}

CommandPlan build_command_plan(const DesignPoint& p, const ScenarioSpec& s) {
    CommandPlan plan;
    plan.steps = {
        {CommandStep::Kind::set_cores, static_cast<double>(p.cores), ""},
        {CommandStep::Kind::set_frequency, p.core_frequency_ghz, ""},
        {CommandStep::Kind::set_lidar_rate, static_cast<double>(p.lidar_hz), ""},
        {CommandStep::Kind::start_profiling, 0.0, ""},
        {CommandStep::Kind::launch_task, 0.0, to_string(s.task) + "@" + s.map_id},
        {CommandStep::Kind::stop_profiling, 0.0, ""},
        {CommandStep::Kind::collect_outputs, 0.0, ""},
    };
    return plan;
}

std::string to_text(const CommandPlan& plan) {
    std::ostringstream os;
    for (const auto& step : plan.steps) {
        os << to_string(step.kind);
        switch (step.kind) {
        case CommandStep::Kind::set_cores:
        case CommandStep::Kind::set_lidar_rate:
            os << ' ' << static_cast<long long>(step.value);
            break;
        case CommandStep::Kind::set_frequency: {
            std::ostringstream v;
            v.precision(17);
            v << step.value;
            os << ' ' << v.str();
            break;
        }
        case CommandStep::Kind::launch_task:
            os << ' ' << step.argument;
            break;
        default:
            break;
        }
        os << '\n';
    }
    return os.str();
}

CommandPlan plan_from_text(const std::string& text) {
    CommandPlan plan;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        CommandStep step;
        if (kind == "set_cores") {
            step.kind = CommandStep::Kind::set_cores;
            ls >> step.value;
        } else if (kind == "set_frequency") {
            step.kind = CommandStep::Kind::set_frequency;
            ls >> step.value;
        } else if (kind == "set_lidar_rate") {
            step.kind = CommandStep::Kind::set_lidar_rate;
            ls >> step.value;
        } else if (kind == "start_profiling") {
            step.kind = CommandStep::Kind::start_profiling;
        } else if (kind == "launch_task") {
            step.kind = CommandStep::Kind::launch_task;
            ls >> step.argument;
        } else if (kind == "stop_profiling") {
            step.kind = CommandStep::Kind::stop_profiling;
        } else if (kind == "collect_outputs") {
            step.kind = CommandStep::Kind::collect_outputs;
        } else {
            throw ConfigError("unknown command step '" + kind + "'");
        }
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

DesignPoint point_from_plan(const CommandPlan& plan) {
    DesignPoint p;
    for (const auto& step : plan.steps) {
        if (step.kind == CommandStep::Kind::set_cores) p.cores = static_cast<int>(step.value);
        if (step.kind == CommandStep::Kind::set_frequency) p.core_frequency_ghz = step.value;
        if (step.kind == CommandStep::Kind::set_lidar_rate)
            p.lidar_hz = static_cast<int>(step.value);
    }
    return p;
}

SimulationOutput SyntheticExecutor::run(const CommandPlan& plan, const ScenarioSpec& s,
                                        std::uint64_t seed) {
    if (auto why = plan.check(); !why.empty()) throw ExecutorError("bad command plan: " + why);
    return model_.simulate(point_from_plan(plan), s, seed);
}

SimulationOutput ExternalExecutor::run(const CommandPlan&, const ScenarioSpec&,
                                       std::uint64_t) {
    throw ExecutorError(
        "external executor is a declared integration boundary; no toolchain is wired up");
}

std::vector<MemoryRecord> select_references(const History& memory, int k_recent,
                                            const Constraints& constraints) {
    if (memory.empty()) return {};

    // Extremes; ties resolved toward the earliest iteration.
    const MemoryRecord* lowest_cost = nullptr;
    const MemoryRecord* highest_cost = nullptr;
    const MemoryRecord* fastest_feasible = nullptr;
    const MemoryRecord* slowest = nullptr;
    for (const auto& r : memory) {
        if (!lowest_cost || r.metrics.hw_cost < lowest_cost->metrics.hw_cost) lowest_cost = &r;
        if (!highest_cost || r.metrics.hw_cost > highest_cost->metrics.hw_cost)
            highest_cost = &r;
        if (is_feasible(r.metrics, constraints) &&
            (!fastest_feasible || r.metrics.nav_time_s < fastest_feasible->metrics.nav_time_s))
            fastest_feasible = &r;
        if (!slowest || r.metrics.nav_time_s > slowest->metrics.nav_time_s) slowest = &r;
    }

    std::set<int> extreme_iters;
    std::map<int, const MemoryRecord*> selected;
    for (const MemoryRecord* r : {lowest_cost, highest_cost, fastest_feasible, slowest}) {
        if (!r) continue;
        selected[r->iteration] = r;
        extreme_iters.insert(r->iteration);
    }
    for (int i = 0; i < k_recent && i < static_cast<int>(memory.size()); ++i) {
        const MemoryRecord& r = memory[memory.size() - 1 - static_cast<std::size_t>(i)];
        selected[r.iteration] = &r;
    }

    constexpr std::size_t kCap = 6;
    while (selected.size() > kCap) {
        // Drop the oldest non-extreme record.
        auto victim = selected.end();
        for (auto it = selected.begin(); it != selected.end(); ++it) {
            if (!extreme_iters.count(it->first)) {
                victim = it;
                break;
            }
        }
        if (victim == selected.end()) victim = selected.begin();
        selected.erase(victim);
    }

    std::vector<MemoryRecord> out;
    for (const auto& [iter, r] : selected) out.push_back(*r);
    return out;
}

CombinedReport combined_report(const PerformanceReport& perf, const TrajectoryVerdict& verdict,
                               const Metrics& metrics) {
    CombinedReport cr;
    cr.performance = perf;
    cr.verdict = verdict;
    cr.metrics = metrics;

    std::ostringstream os;
    os << "The navigation time is " << metrics.nav_time_s
       << " seconds, and the control command issue rate is " << metrics.ctrl_rate_hz
       << " Hz.\n";
    os << "Visual analysis:\n(1) "
       << (verdict.status == NavStatus::navigation_completed
               ? "Yes, the vehicle did reach the goal point"
               : "No, the vehicle did not reach the goal point");
    if (verdict.deviation_score)
        os << " (normalized deviation score: " << *verdict.deviation_score << ")";
    os << ";\n(2) ";
    if (verdict.quality_flags.empty()) {
        os << "no zig-zag, jitter, or erratic behavior;";
    } else {
        os << "trajectory shows:";
        for (const auto& f : verdict.quality_flags) os << ' ' << to_string(f) << ';';
    }
    os << "\n(3) " << verdict.narrative << "\n";
    os << "Trace analysis:\n" << report_to_json(perf) << "\n";
    cr.text = os.str();
    return cr;
}

std::string to_string(TerminationCause c) {
    switch (c) {
    case TerminationCause::budget: return "budget";
    case TerminationCause::strategy: return "strategy";
    case TerminationCause::exhausted: return "exhausted";
    }
    return "?";
}

std::string record_to_json(const MemoryRecord& r) {
    return record_json(r).dump();
}

std::string result_to_json(const ExplorationResult& r, int indent) {
    ordered_json j;
    j["iterations_used"] = r.iterations_used;
    j["evaluations"] = static_cast<int>(r.records.size());
    j["terminated_by"] = to_string(r.terminated_by);
    ordered_json recs = ordered_json::array();
    for (const auto& rec : r.records) recs.push_back(record_json(rec));
    j["records"] = recs;
    ordered_json feas = ordered_json::array();
    for (const auto& rec : r.feasible) feas.push_back(rec.iteration);
    j["feasible_iterations"] = feas;
    ordered_json front = ordered_json::array();
    for (const auto& rec : r.pareto_found) front.push_back(record_json(rec));
    j["pareto_found"] = front;
    if (r.best)
        j["best"] = record_json(*r.best);
    else
        j["best"] = nullptr;
    if (r.abort_reason) j["abort_reason"] = *r.abort_reason;
    // Labeled wall-clock field: the one part of the result that varies
    // between identical runs.
    j["wall_clock_s"] = r.wall_clock_s;
    return j.dump(indent) + "\n";
}

ExplorationResult run_exploration(Strategy& strategy, Executor& executor,
                                  const ExplorationSetup& setup, const RunOptions& options) {
    if (setup.budget < 1) throw ConfigError("budget must be >= 1");
    if (auto why = setup.space.check(); !why.empty()) throw ConfigError("space: " + why);
    if (auto why = setup.scenario.check(); !why.empty()) throw ConfigError("scenario: " + why);

    auto t0 = std::chrono::steady_clock::now();

    const bool write_files = !options.output_dir.empty();
    fs::path run_dir(options.output_dir);
    std::ofstream memory_file;
    if (write_files) {
        fs::create_directories(run_dir / "reports");
        memory_file.open(run_dir / "memory.jsonl", std::ios::trunc);
    }

    auto observe = [&](int iteration, const char* phase) {
        if (options.phase_observer) options.phase_observer(iteration, phase);
    };

    Rng strategy_rng = make_substream(setup.seed, "strategy");
    GuidedStrategy fallback(GuidedParams{}, setup.scenario.constraints);

    ExplorationResult result;
    std::map<DesignPoint, CombinedReport> cache;
    std::optional<CombinedReport> last_report;
    int evaluations = 0;
    int iteration = 0;
    // Cache hits consume no budget; the hard cap keeps a re-requesting
    // strategy from spinning forever. A final terminate-only proposal does
    // not count as an iteration, so without cache hits iterations_used
    // equals the record count.
    const int max_iterations = setup.budget * 2;
    result.terminated_by = TerminationCause::budget;

    while (evaluations < setup.budget && iteration < max_iterations) {
        observe(iteration + 1, "propose");
        Proposal proposal;
        const CombinedReport* last = last_report ? &*last_report : nullptr;
        try {
            proposal = strategy.propose(result.records, last, setup.space, strategy_rng, false);
        } catch (const UnparseableResponseError&) {
            try {
                // One retry with a format reminder, then the guided fallback.
                proposal =
                    strategy.propose(result.records, last, setup.space, strategy_rng, true);
            } catch (const UnparseableResponseError&) {
                proposal = fallback.propose(result.records, last, setup.space, strategy_rng,
                                            false);
                proposal.rationale = "fallback after unparseable responses: " + proposal.rationale;
            }
        }

        if (proposal.terminate) {
            result.terminated_by = result.records.size() == setup.space.size()
                                       ? TerminationCause::exhausted
                                       : TerminationCause::strategy;
            break;
        }
        ++iteration;
        if (auto v = validate(proposal.point, setup.space); !v.ok)
            throw ConfigError("strategy proposed a point outside the space (bad " + v.field +
                              ")");

        // Cache: a re-proposed point is served without re-simulation and
        // without consuming budget.
        if (auto hit = cache.find(proposal.point); hit != cache.end()) {
            last_report = hit->second;
            continue;
        }

        observe(iteration, "plan");
        CommandPlan plan = build_command_plan(proposal.point, setup.scenario);

        observe(iteration, "execute");
        SimulationOutput sim;
        try {
            sim = executor.run(plan, setup.scenario, setup.seed);
        } catch (const std::exception& e) {
            result.abort_reason = e.what();
            break;
        }

        observe(iteration, "decipher");
        Evaluation ev = analyze_output(sim, proposal.point, setup.scenario, setup.analyzer);
        CombinedReport report = combined_report(ev.report, ev.verdict, ev.metrics);

        observe(iteration, "record");
        MemoryRecord record;
        record.iteration = static_cast<int>(result.records.size()) + 1;
        record.point = proposal.point;
        record.metrics = ev.metrics;
        record.bottleneck_flags = ev.report.bottleneck_flags;
        record.verdict_status = ev.verdict.status;
        record.verdict_narrative = ev.verdict.narrative;
        record.rationale = proposal.rationale;
        result.records.push_back(record);
        ++evaluations;

        if (write_files) {
            memory_file << record_to_json(record) << '\n';
            memory_file.flush();
            atomic_write(run_dir / "reports" /
                             ("iter_" + std::to_string(record.iteration) + ".json"),
                         report.text);
        }

        cache.emplace(proposal.point, report);
        last_report = std::move(report);
    }
    result.iterations_used = iteration;

    for (const auto& r : result.records)
        if (is_feasible(r.metrics, setup.scenario.constraints)) result.feasible.push_back(r);

    // pareto_found = the non-dominated subset of the feasible records.
    std::vector<ObjectivePoint> objective;
    for (const auto& r : result.feasible)
        objective.push_back(ObjectivePoint{r.metrics.nav_time_s, r.metrics.hw_cost, r.point});
    auto front = pareto_front(objective);
    std::set<DesignPoint> front_sources;
    for (const auto& p : front) front_sources.insert(p.source);
    for (const auto& r : result.feasible)
        if (front_sources.count(r.point)) result.pareto_found.push_back(r);

    for (const auto& r : result.pareto_found) {
        if (!result.best || r.metrics.hw_cost < result.best->metrics.hw_cost ||
            (r.metrics.hw_cost == result.best->metrics.hw_cost &&
             r.metrics.nav_time_s < result.best->metrics.nav_time_s))
            result.best = r;
    }

    result.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write_files) atomic_write(run_dir / "result.json", result_to_json(result));
    return result;
}

} // namespace dse
