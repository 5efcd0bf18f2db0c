#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dse/design_space.hpp"
#include "dse/memory_record.hpp"
#include "dse/rng.hpp"

namespace dse {

// A strategy's answer: the next point to evaluate, why, and whether the
// strategy is done.
struct Proposal {
    DesignPoint point;
    std::string rationale;
    bool terminate = false;
};

// Design-point proposal strategy. One instance drives one exploration run;
// propose() is never called concurrently on the same instance.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string name() const = 0;
    // `last` is the combined report of the previous evaluation (null on the
    // first call). `format_reminder` is set on the retry after an
    // unparseable LLM response; other strategies ignore it.
    virtual Proposal propose(const History& history, const CombinedReport* last,
                             const DesignSpace& space, Rng& rng,
                             bool format_reminder = false) = 0;
};

// Walks the enumeration order, skipping evaluated points.
class ExhaustiveStrategy : public Strategy {
public:
    std::string name() const override { return "exhaustive"; }
    Proposal propose(const History&, const CombinedReport*, const DesignSpace&, Rng&,
                     bool) override;
};

// Uniform over the not-yet-evaluated points.
class RandomStrategy : public Strategy {
public:
    std::string name() const override { return "random"; }
    Proposal propose(const History&, const CombinedReport*, const DesignSpace&, Rng&,
                     bool) override;
};

struct GAParams {
    int population_size = 5;
    int tournament_size = 2;
    double mutation_prob = 0.2;
    int elitism = 1;
    // Fitness is -nav_time with this many timeouts' worth of penalty added
    // for infeasible points.
    double infeasible_penalty_timeouts = 10.0;
};

// Child takes the first `cut` genes (1 or 2) from `a` and the rest from `b`.
std::array<int, 3> one_point_crossover(const std::array<int, 3>& a,
                                       const std::array<int, 3>& b, int cut);

// One generation step: tournament selection, one-point crossover on the
// 3-gene index chromosome (core index, frequency index, lidar index),
// per-gene mutation to a uniformly random other index, elitism keeping the
// best individual.
std::vector<DesignPoint> genetic_step(
    const std::vector<std::pair<DesignPoint, double>>& population, const GAParams& params,
    const DesignSpace& space, Rng& rng);

// Genetic baseline. Seeds a random initial population, then advances one
// generation whenever the current one is fully evaluated. Individuals whose
// fitness is already known are not re-proposed.
class GeneticStrategy : public Strategy {
public:
    explicit GeneticStrategy(GAParams params, const Constraints& constraints,
                             double timeout_s);
    std::string name() const override { return "ga"; }
    Proposal propose(const History&, const CombinedReport*, const DesignSpace&, Rng&,
                     bool) override;

private:
    double fitness_of(const Metrics& m) const;

    GAParams params_;
    Constraints constraints_;
    double timeout_s_;
    std::vector<DesignPoint> pending_;
    std::vector<DesignPoint> generation_;
    bool initialized_ = false;
};

struct GuidedParams {
    int core_step_indices = 4;  // R1 core bump
    int freq_step_indices = 1;  // R1 frequency bump (alternating firings)
};

// State the rule cascade carries across firings.
struct GuidedState {
    bool bump_frequency_next = false;
};

// Deterministic emulation of the reasoning loop:
//   R1  infeasible / slow control / CPU-bound  -> more compute
//   R2  frequency-bound                        -> move the LiDAR rate
//   R3  feasible and clean                     -> walk cost down while the
//       nearest evaluated neighbor stayed feasible
//   R4  nothing admissible                     -> re-propose the best known
//       feasible point and terminate
// `issues` (when available) orients the R2 LiDAR move; without it the rate
// steps toward the other end of the axis.
Proposal guided_rules(const MemoryRecord& last, const History& history,
                      const DesignSpace& space, const Constraints& constraints,
                      const GuidedParams& params, GuidedState& state,
                      const std::vector<DetectedIssue>* issues = nullptr);

class GuidedStrategy : public Strategy {
public:
    GuidedStrategy(GuidedParams params, const Constraints& constraints);
    std::string name() const override { return "guided"; }
    Proposal propose(const History&, const CombinedReport*, const DesignSpace&, Rng&,
                     bool) override;

private:
    GuidedParams params_;
    Constraints constraints_;
    GuidedState state_;
};

// Injected text-completion function: (system prompt, instruction) -> reply.
using CompletionBackend = std::function<std::string(const std::string&, const std::string&)>;

// Replays a fixed transcript; repeats the last entry when exhausted.
CompletionBackend scripted_backend(std::vector<std::string> transcript);

// POSTs {"system":..,"prompt":..} to the endpoint named by the
// DSE_LLM_ENDPOINT environment variable and returns the "completion" field.
CompletionBackend http_backend(const std::string& endpoint_url);

// Two-stage prompt assembly: a fixed system prompt (objectives, axis sets,
// output-format contract) and a per-iteration instruction carrying the last
// evaluation and the curated reference records.
std::pair<std::string, std::string> assemble_prompts(
    const std::string& task_name, const DesignSpace& space,
    const std::vector<MemoryRecord>& references, const MemoryRecord* last,
    const CombinedReport* last_report);

// Renders one "Reference design point" block body line for a record.
std::string reference_line(const MemoryRecord& rec);

// Extracts the first recognizable design-point tuple ("(16 cores, 1.8 GHz,
// 14 Hz ...)" or "number_of_cores = 16, ...") and clamps each value to the
// nearest axis member. Throws UnparseableResponseError when nothing matches.
Proposal parse_llm_proposal(const std::string& response_text, const DesignSpace& space);

// Adapter over an injected completion backend. On an unparseable reply the
// orchestrator retries once with a format reminder; a second failure falls
// back to the guided rules.
class LlmStrategy : public Strategy {
public:
    LlmStrategy(CompletionBackend backend, const Constraints& constraints,
                std::string task_name = "lane_driving");
    std::string name() const override { return "llm"; }
    Proposal propose(const History&, const CombinedReport*, const DesignSpace&, Rng&,
                     bool format_reminder) override;

    int completions_requested() const { return completions_requested_; }

private:
    CompletionBackend backend_;
    Constraints constraints_;
    std::string task_name_;
    int k_recent_ = 3;
    int completions_requested_ = 0;
};

// Strategy factory for the config file's strategy section.
std::unique_ptr<Strategy> make_strategy(const std::string& name, const GAParams& ga,
                                        const GuidedParams& guided,
                                        const Constraints& constraints, double timeout_s,
                                        CompletionBackend llm_backend,
                                        const std::string& task_name);

} // namespace dse
