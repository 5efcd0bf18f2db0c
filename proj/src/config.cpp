#include "dse/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dse/errors.hpp"
#include "json.hpp"

namespace dse {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::vector<int> parse_int_axis(const nlohmann::json& j, const char* field) {
    std::vector<int> out;
    if (j.is_object() && j.contains("range")) {
        const auto& r = j.at("range");
        if (!r.is_array() || r.size() != 2)
            throw ConfigError(std::string(field) + ": range must be [first, last]");
        int lo = r[0].get<int>(), hi = r[1].get<int>();
        if (hi < lo) throw ConfigError(std::string(field) + ": empty range");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    if (!j.is_array()) throw ConfigError(std::string(field) + ": expected array or range");
    for (const auto& v : j) out.push_back(v.get<int>());
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

ExplorationConfig parse_config(const std::string& json_text, const std::string& base_dir) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExplorationConfig cfg;
    try {
        if (!root.contains("scenario")) throw ConfigError("config: missing scenario section");
        cfg.scenario = load_scenario(root.at("scenario").dump());

        if (!root.contains("space")) throw ConfigError("config: missing space section");
        const auto& sp = root.at("space");
        cfg.space.core_counts = parse_int_axis(sp.at("core_counts"), "core_counts");
        for (const auto& f : sp.at("frequencies_ghz"))
            cfg.space.frequencies_ghz.push_back(f.get<double>());
        cfg.space.lidar_rates_hz = parse_int_axis(sp.at("lidar_rates_hz"), "lidar_rates_hz");
        if (auto why = cfg.space.check(); !why.empty()) throw ConfigError("space: " + why);

        if (root.contains("strategy")) {
            const auto& st = root.at("strategy");
            cfg.strategy.name = st.value("name", "guided");
            if (st.contains("ga")) {
                const auto& ga = st.at("ga");
                cfg.strategy.ga.population_size =
                    ga.value("population_size", cfg.strategy.ga.population_size);
                cfg.strategy.ga.tournament_size =
                    ga.value("tournament_size", cfg.strategy.ga.tournament_size);
                cfg.strategy.ga.mutation_prob =
                    ga.value("mutation_prob", cfg.strategy.ga.mutation_prob);
                cfg.strategy.ga.elitism = ga.value("elitism", cfg.strategy.ga.elitism);
                cfg.strategy.ga.infeasible_penalty_timeouts = ga.value(
                    "infeasible_penalty_timeouts", cfg.strategy.ga.infeasible_penalty_timeouts);
            }
            if (st.contains("guided")) {
                const auto& g = st.at("guided");
                cfg.strategy.guided.core_step_indices =
                    g.value("core_step_indices", cfg.strategy.guided.core_step_indices);
                cfg.strategy.guided.freq_step_indices =
                    g.value("freq_step_indices", cfg.strategy.guided.freq_step_indices);
            }
        }

        cfg.budget = root.value("budget", cfg.budget);
        if (cfg.budget < 1) throw ConfigError("budget: must be >= 1");
        cfg.seed = root.value("seed", cfg.seed);
        cfg.output_dir = root.value("output_dir", cfg.output_dir);

        if (!root.contains("model") || !root.at("model").contains("calibration"))
            throw ConfigError("config: missing model.calibration");
        const auto& calib = root.at("model").at("calibration");
        if (calib.is_string()) {
            fs::path p = calib.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
            cfg.calibration = PipelineCalibration::from_file(p.string());
        } else {
            cfg.calibration = PipelineCalibration::from_json(calib.dump());
        }

        if (root.contains("llm")) {
            LlmConfig llm;
            const auto& lj = root.at("llm");
            llm.backend = lj.value("backend", llm.backend);
            if (lj.contains("transcript"))
                for (const auto& t : lj.at("transcript"))
                    llm.transcript.push_back(t.get<std::string>());
            if (llm.backend != "scripted" && llm.backend != "http")
                throw ConfigError("llm.backend: expected 'scripted' or 'http'");
            cfg.llm = std::move(llm);
        }

        if (root.contains("analysis")) {
            const auto& a = root.at("analysis");
            cfg.analyzer.resample_points = a.value("resample_points", cfg.analyzer.resample_points);
            cfg.analyzer.goal_tolerance_m = a.value("goal_tolerance_m", cfg.analyzer.goal_tolerance_m);
            cfg.analyzer.lane_width_m = a.value("lane_width_m", cfg.analyzer.lane_width_m);
            cfg.analyzer.zig_zag_reversals_per_100m =
                a.value("zig_zag_reversals_per_100m", cfg.analyzer.zig_zag_reversals_per_100m);
            cfg.analyzer.jitter_rad_per_m = a.value("jitter_rad_per_m", cfg.analyzer.jitter_rad_per_m);
            cfg.analyzer.deviation_norm_m = a.value("deviation_norm_m", cfg.analyzer.deviation_norm_m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExplorationConfig load_config(const std::string& path) {
    return parse_config(slurp(path), fs::path(path).parent_path().string());
}

std::string config_to_json(const ExplorationConfig& cfg) {
    ordered_json j;
    ordered_json scenario;
    scenario["task"] = to_string(cfg.scenario.task);
    scenario["map_id"] = cfg.scenario.map_id;
    ordered_json line = ordered_json::array();
    for (const auto& p : cfg.scenario.centerline.points) line.push_back({p.x, p.y});
    scenario["centerline"] = line;
    scenario["start"] = {cfg.scenario.start.x, cfg.scenario.start.y};
    scenario["goal"] = {cfg.scenario.goal.x, cfg.scenario.goal.y};
    scenario["cruise_speed_kmh"] = cfg.scenario.cruise_speed_kmh;
    scenario["max_nav_time_s"] = cfg.scenario.constraints.max_nav_time_s;
    scenario["min_ctrl_rate_hz"] = cfg.scenario.constraints.min_ctrl_rate_hz;
    scenario["timeout_s"] = cfg.scenario.timeout_s;
    j["scenario"] = scenario;

    ordered_json space;
    space["core_counts"] = cfg.space.core_counts;
    space["frequencies_ghz"] = cfg.space.frequencies_ghz;
    space["lidar_rates_hz"] = cfg.space.lidar_rates_hz;
    j["space"] = space;

    ordered_json strategy;
    strategy["name"] = cfg.strategy.name;
    strategy["ga"] = {{"population_size", cfg.strategy.ga.population_size},
                      {"tournament_size", cfg.strategy.ga.tournament_size},
                      {"mutation_prob", cfg.strategy.ga.mutation_prob},
                      {"elitism", cfg.strategy.ga.elitism},
                      {"infeasible_penalty_timeouts",
                       cfg.strategy.ga.infeasible_penalty_timeouts}};
    strategy["guided"] = {{"core_step_indices", cfg.strategy.guided.core_step_indices},
                          {"freq_step_indices", cfg.strategy.guided.freq_step_indices}};
    j["strategy"] = strategy;

    j["budget"] = cfg.budget;
    j["seed"] = cfg.seed;
    j["output_dir"] = cfg.output_dir;

    ordered_json stages = ordered_json::array();
    for (const auto& st : cfg.calibration.stages)
        stages.push_back({{"name", st.name},
                          {"workload_gcycles", st.workload_gcycles},
                          {"parallel_fraction", st.parallel_fraction}});
    j["model"] = {{"calibration",
                   {{"stages", stages},
                    {"coordination_overhead_per_core",
                     cfg.calibration.coordination_overhead_per_core},
                    {"frequency_stall_per_ghz", cfg.calibration.frequency_stall_per_ghz},
                    {"ctrl_ref_hz", cfg.calibration.ctrl_ref_hz},
                    {"stability_cutoff_hz", cfg.calibration.stability_cutoff_hz},
                    {"jitter_gain_m_hz", cfg.calibration.jitter_gain_m_hz},
                    {"jitter_max_m", cfg.calibration.jitter_max_m},
                    {"jitter_wavelength_m", cfg.calibration.jitter_wavelength_m}}}};

    if (cfg.llm) {
        ordered_json llm;
        llm["backend"] = cfg.llm->backend;
        llm["transcript"] = cfg.llm->transcript;
        j["llm"] = llm;
    }

    ordered_json analysis;
    analysis["resample_points"] = cfg.analyzer.resample_points;
    analysis["goal_tolerance_m"] = cfg.analyzer.goal_tolerance_m;
    analysis["lane_width_m"] = cfg.analyzer.lane_width_m;
    analysis["zig_zag_reversals_per_100m"] = cfg.analyzer.zig_zag_reversals_per_100m;
    analysis["jitter_rad_per_m"] = cfg.analyzer.jitter_rad_per_m;
    analysis["deviation_norm_m"] = cfg.analyzer.deviation_norm_m;
    j["analysis"] = analysis;

    return j.dump(2) + "\n";
}

CompletionBackend make_backend(const ExplorationConfig& cfg) {
    if (!cfg.llm) return nullptr;
    if (cfg.llm->backend == "scripted") return scripted_backend(cfg.llm->transcript);
    const char* endpoint = std::getenv("DSE_LLM_ENDPOINT");
    if (!endpoint || !*endpoint)
        throw ConfigError("llm.backend is 'http' but DSE_LLM_ENDPOINT is not set");
    return http_backend(endpoint);
}

} // namespace dse
