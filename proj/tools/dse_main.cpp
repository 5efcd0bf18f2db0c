// Command-line entry point: config ingestion, run execution, trace analysis
// and report/plot-data emission.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dse/config.hpp"
#include "dse/errors.hpp"
#include "dse/orchestrator.hpp"
#include "dse/pareto.hpp"
#include "dse/rng.hpp"
#include "dse/vehicle_model.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitExecutor = 3;

struct Overrides {
    std::string strategy;
    int budget = -1;
    long long seed = -1;
    std::string out;
};

void apply_overrides(dse::ExplorationConfig& cfg, const Overrides& ov) {
    if (!ov.strategy.empty()) cfg.strategy.name = ov.strategy;
    if (ov.budget >= 0) cfg.budget = ov.budget;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (!ov.out.empty()) cfg.output_dir = ov.out;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<dse::ObjectivePoint> feasible_objectives(
    const std::vector<std::pair<dse::DesignPoint, dse::Metrics>>& truth,
    const dse::Constraints& constraints) {
    std::vector<dse::ObjectivePoint> pts;
    for (const auto& [point, metrics] : truth)
        if (dse::is_feasible(metrics, constraints))
            pts.push_back({metrics.nav_time_s, metrics.hw_cost, point});
    return pts;
}

ordered_json front_json(const std::vector<dse::ObjectivePoint>& front) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : front)
        arr.push_back({{"cores", p.source.cores},
                       {"core_frequency_ghz", p.source.core_frequency_ghz},
                       {"lidar_hz", p.source.lidar_hz},
                       {"nav_time_s", p.nav_time_s},
                       {"hw_cost", p.hw_cost}});
    return arr;
}

struct StrategyRun {
    std::string strategy;
    std::uint64_t seed = 0;
    int hits = 0;
    int first_hit_iteration = 0;  // budget + 1 when the front was never hit
    double best_cost = 0.0;       // 0 when no feasible point was found
    double best_nav = 0.0;
    int evaluations = 0;
    std::string terminated_by;
};

// One budgeted exploration without a run directory; used by compare.
StrategyRun run_one(const dse::ExplorationConfig& cfg, const std::string& strategy_name,
                    std::uint64_t seed,
                    const std::vector<dse::ObjectivePoint>& truth_front) {
    dse::ExplorationConfig run_cfg = cfg;
    run_cfg.strategy.name = strategy_name;
    run_cfg.seed = seed;

    auto strategy = dse::make_strategy(
        strategy_name, run_cfg.strategy.ga, run_cfg.strategy.guided,
        run_cfg.scenario.constraints, run_cfg.scenario.timeout_s, dse::make_backend(run_cfg),
        dse::to_string(run_cfg.scenario.task));
    dse::SyntheticExecutor executor{dse::VehicleModel(run_cfg.calibration)};
    dse::ExplorationSetup setup{run_cfg.scenario, run_cfg.space, run_cfg.budget, run_cfg.seed,
                                run_cfg.analyzer};
    auto result = dse::run_exploration(*strategy, executor, setup);

    StrategyRun out;
    out.strategy = strategy_name;
    out.seed = seed;
    out.evaluations = static_cast<int>(result.records.size());
    out.terminated_by = dse::to_string(result.terminated_by);

    std::set<dse::DesignPoint> front_sources;
    for (const auto& p : truth_front) front_sources.insert(p.source);
    std::set<dse::DesignPoint> hit;
    out.first_hit_iteration = run_cfg.budget + 1;
    for (const auto& rec : result.records) {
        if (front_sources.count(rec.point)) {
            hit.insert(rec.point);
            if (out.first_hit_iteration > run_cfg.budget)
                out.first_hit_iteration = rec.iteration;
        }
    }
    out.hits = static_cast<int>(hit.size());
    if (result.best) {
        out.best_cost = result.best->metrics.hw_cost;
        out.best_nav = result.best->metrics.nav_time_s;
    }
    return out;
}

int cmd_explore(const std::string& config_path, const Overrides& ov) {
    dse::ExplorationConfig cfg;
    try {
        cfg = dse::load_config(config_path);
        apply_overrides(cfg, ov);
        if (cfg.budget < 1) throw dse::ConfigError("budget: must be >= 1");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        auto strategy = dse::make_strategy(cfg.strategy.name, cfg.strategy.ga,
                                           cfg.strategy.guided, cfg.scenario.constraints,
                                           cfg.scenario.timeout_s, dse::make_backend(cfg),
                                           dse::to_string(cfg.scenario.task));
        dse::VehicleModel model(cfg.calibration);
        dse::SyntheticExecutor executor{model};
        dse::ExplorationSetup setup{cfg.scenario, cfg.space, cfg.budget, cfg.seed,
                                    cfg.analyzer};
        dse::RunOptions options;
        options.output_dir = cfg.output_dir;
        fs::create_directories(cfg.output_dir);
        atomic_write(fs::path(cfg.output_dir) / "config.json", dse::config_to_json(cfg));

        auto result = dse::run_exploration(*strategy, executor, setup, options);
        if (result.abort_reason) {
            std::cerr << "executor failure: " << *result.abort_reason << "\n";
            return kExitExecutor;
        }

        // Front hits against the exhaustively evaluated ground truth.
        auto truth = dse::ground_truth(model, cfg.space, cfg.scenario, cfg.seed);
        auto truth_front =
            dse::pareto_front(feasible_objectives(truth, cfg.scenario.constraints));
        std::vector<dse::ObjectivePoint> found;
        for (const auto& r : result.pareto_found)
            found.push_back({r.metrics.nav_time_s, r.metrics.hw_cost, r.point});
        int hits = dse::front_hits(found, truth_front);

        std::cout << "strategy: " << cfg.strategy.name << "\n"
                  << "evaluations: " << result.records.size() << " (terminated by "
                  << dse::to_string(result.terminated_by) << ")\n";
        if (result.best) {
            std::cout << "best feasible point: " << dse::to_string(result.best->point)
                      << "  nav " << result.best->metrics.nav_time_s << " s, cost "
                      << result.best->metrics.hw_cost << "\n";
        } else {
            std::cout << "best feasible point: none found\n";
        }
        std::cout << "truth-front hits: " << hits << " of " << truth_front.size() << "\n"
                  << "run directory: " << cfg.output_dir << "\n";
        return kExitOk;
    } catch (const dse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "executor failure: " << e.what() << "\n";
        return kExitExecutor;
    }
}

int cmd_exhaustive(const std::string& config_path, const Overrides& ov) {
    dse::ExplorationConfig cfg;
    try {
        cfg = dse::load_config(config_path);
        apply_overrides(cfg, ov);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        dse::VehicleModel model(cfg.calibration);
        auto truth = dse::ground_truth(model, cfg.space, cfg.scenario, cfg.seed);
        auto truth_front =
            dse::pareto_front(feasible_objectives(truth, cfg.scenario.constraints));

        fs::path out_dir(cfg.output_dir);
        atomic_write(out_dir / "ground_truth.csv",
                     dse::emit_plot_data(truth, truth_front, {}, cfg.scenario.constraints));
        ordered_json front;
        front["front_size"] = truth_front.size();
        front["points"] = front_json(truth_front);
        atomic_write(out_dir / "truth_front.json", front.dump(2) + "\n");

        std::cout << "evaluated " << truth.size() << " points; front size "
                  << truth_front.size() << "\n"
                  << "wrote " << (out_dir / "ground_truth.csv").string() << " and "
                  << (out_dir / "truth_front.json").string() << "\n";
        return kExitOk;
    } catch (const dse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "executor failure: " << e.what() << "\n";
        return kExitExecutor;
    }
}

int cmd_compare(const std::string& config_path, const Overrides& ov,
                std::vector<std::string> strategies, std::vector<long long> seeds) {
    dse::ExplorationConfig cfg;
    try {
        cfg = dse::load_config(config_path);
        apply_overrides(cfg, ov);
        if (strategies.empty()) strategies = {"guided", "ga", "random"};
        if (seeds.empty()) seeds = {static_cast<long long>(cfg.seed)};
        for (const auto& s : strategies) {
            // Validate names before spending any simulation time.
            dse::make_strategy(s, cfg.strategy.ga, cfg.strategy.guided,
                               cfg.scenario.constraints, cfg.scenario.timeout_s,
                               dse::scripted_backend({}), dse::to_string(cfg.scenario.task));
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        dse::VehicleModel model(cfg.calibration);
        auto truth = dse::ground_truth(model, cfg.space, cfg.scenario, cfg.seed);
        auto truth_front =
            dse::pareto_front(feasible_objectives(truth, cfg.scenario.constraints));

        std::vector<StrategyRun> runs(strategies.size() * seeds.size());
        // Independent budgeted runs; evaluation order inside each run stays
        // sequential, runs themselves are data-parallel.
        #pragma omp parallel for collapse(2) schedule(dynamic)
        for (std::size_t si = 0; si < strategies.size(); ++si) {
            for (std::size_t ki = 0; ki < seeds.size(); ++ki) {
                runs[si * seeds.size() + ki] =
                    run_one(cfg, strategies[si], static_cast<std::uint64_t>(seeds[ki]),
                            truth_front);
            }
        }

        ordered_json per_run = ordered_json::array();
        for (const auto& r : runs) {
            per_run.push_back({{"strategy", r.strategy},
                               {"seed", r.seed},
                               {"hits", r.hits},
                               {"first_hit_iteration", r.first_hit_iteration},
                               {"best_cost", r.best_cost},
                               {"best_nav_time_s", r.best_nav},
                               {"evaluations", r.evaluations},
                               {"terminated_by", r.terminated_by}});
        }

        ordered_json aggregates = ordered_json::object();
        std::cout << "strategy          mean_hits  mean_first_hit  runs\n";
        for (const auto& s : strategies) {
            double hits = 0.0, first = 0.0;
            int n = 0;
            for (const auto& r : runs) {
                if (r.strategy != s) continue;
                hits += r.hits;
                first += r.first_hit_iteration;
                ++n;
            }
            if (n == 0) continue;
            aggregates[s] = {{"mean_hits", hits / n},
                             {"mean_first_hit_iteration", first / n},
                             {"runs", n}};
            std::ostringstream row;
            row.setf(std::ios::left);
            row.width(18);
            row << s;
            std::cout << row.str() << hits / n << "        " << first / n << "          "
                      << n << "\n";
        }

        ordered_json summary;
        summary["budget"] = cfg.budget;
        summary["seeds"] = seeds;
        summary["front_size"] = truth_front.size();
        summary["per_run"] = per_run;
        summary["aggregates"] = aggregates;
        atomic_write(fs::path(cfg.output_dir) / "comparison.json", summary.dump(2) + "\n");
        std::cout << "wrote " << (fs::path(cfg.output_dir) / "comparison.json").string()
                  << "\n";
        return kExitOk;
    } catch (const dse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "executor failure: " << e.what() << "\n";
        return kExitExecutor;
    }
}

int cmd_analyze_trace(const std::string& trace_path, const std::string& topology_path,
                      const std::string& out_path) {
    try {
        std::ifstream trace_file(trace_path);
        if (!trace_file) throw dse::ConfigError("cannot open trace file: " + trace_path);
        auto events = dse::parse_trace(trace_file);

        dse::NodeInputs topology;
        if (!topology_path.empty()) {
            std::ifstream topo_file(topology_path);
            if (!topo_file)
                throw dse::ConfigError("cannot open topology file: " + topology_path);
            nlohmann::json tj =
                nlohmann::json::parse(topo_file, nullptr, true, /*ignore_comments=*/true);
            for (const auto& [node, topics] : tj.items())
                for (const auto& t : topics)
                    topology[node].push_back(t.get<std::string>());
        } else {
            topology = dse::synthetic_topology();
        }

        auto report = dse::build_report(events, topology);
        std::string json = dse::report_to_json(report, 2) + "\n";
        std::cout << json;
        if (!out_path.empty()) atomic_write(out_path, json);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "trace analysis error: " << e.what() << "\n";
        return kExitConfig;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design-space exploration harness for a synthetic driving pipeline"};
    app.require_subcommand(1);

    std::string config_path, trace_path, topology_path, out_path;
    Overrides ov;
    std::vector<std::string> strategies;
    std::vector<long long> seeds;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Path to the exploration config file")
            ->required();
        cmd->add_option("--strategy", ov.strategy, "Override the strategy name");
        cmd->add_option("--budget", ov.budget, "Override the evaluation budget");
        cmd->add_option("--seed", ov.seed, "Override the run seed");
        cmd->add_option("--out", ov.out, "Override the output directory");
    };

    auto* explore = app.add_subcommand("explore", "Run one budgeted exploration");
    add_common(explore);

    auto* exhaustive =
        app.add_subcommand("exhaustive", "Evaluate the full space and extract the true front");
    add_common(exhaustive);

    auto* compare =
        app.add_subcommand("compare", "Run several strategies over several seeds");
    add_common(compare);
    compare->add_option("--strategies", strategies, "Strategy names")->delimiter(',');
    compare->add_option("--seeds", seeds, "Run seeds")->delimiter(',');

    auto* analyze = app.add_subcommand("analyze-trace", "Analyze a trace file");
    analyze->add_option("--trace", trace_path, "Trace file (one JSON record per line)")
        ->required();
    analyze->add_option("--topology", topology_path,
                        "node -> subscribed topics JSON map (defaults to the synthetic "
                        "pipeline topology)");
    analyze->add_option("--out", out_path, "Also write the report JSON here");

    CLI11_PARSE(app, argc, argv);

    if (explore->parsed()) return cmd_explore(config_path, ov);
    if (exhaustive->parsed()) return cmd_exhaustive(config_path, ov);
    if (compare->parsed()) return cmd_compare(config_path, ov, strategies, seeds);
    if (analyze->parsed()) return cmd_analyze_trace(trace_path, topology_path, out_path);
    return kExitConfig;
}
