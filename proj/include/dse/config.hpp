#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dse/design_space.hpp"
#include "dse/scenario.hpp"
#include "dse/search.hpp"
#include "dse/trajectory_analysis.hpp"
#include "dse/vehicle_model.hpp"

namespace dse {

struct StrategyConfig {
    std::string name = "guided";
    GAParams ga;
    GuidedParams guided;
};

struct LlmConfig {
    // "scripted": replay `transcript`; "http": POST to the endpoint named by
    // the DSE_LLM_ENDPOINT environment variable.
    std::string backend = "scripted";
    std::vector<std::string> transcript;
};

// The whole exploration run configuration (one JSON file; // comments
// allowed).
struct ExplorationConfig {
    ScenarioSpec scenario;
    DesignSpace space;
    StrategyConfig strategy;
    int budget = 15;
    std::uint64_t seed = 1;
    std::string output_dir = "runs/out";
    PipelineCalibration calibration;
    std::optional<LlmConfig> llm;
    TrajectoryAnalyzerParams analyzer;
};

// Loads and fully validates a config file. Relative calibration paths
// resolve against the config file's directory. Throws ConfigError.
ExplorationConfig load_config(const std::string& path);

// Parses config text; `base_dir` anchors relative calibration paths (the
// calibration may also be inlined as an object).
ExplorationConfig parse_config(const std::string& json_text, const std::string& base_dir);

// The effective config (after CLI overrides) as self-contained JSON text:
// reloading the echo yields an equal configuration.
std::string config_to_json(const ExplorationConfig& config);

CompletionBackend make_backend(const ExplorationConfig& config);

} // namespace dse
