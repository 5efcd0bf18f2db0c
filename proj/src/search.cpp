#include "dse/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <set>
#include <sstream>

#include "dse/errors.hpp"
#include "dse/orchestrator.hpp"
#include "httplib.h"
#include "json.hpp"

namespace dse {

namespace {

std::set<DesignPoint> evaluated_points(const History& history) {
    std::set<DesignPoint> seen;
    for (const auto& r : history) seen.insert(r.point);
    return seen;
}

const MemoryRecord* best_feasible(const History& history, const Constraints& constraints) {
    const MemoryRecord* best = nullptr;
    for (const auto& r : history) {
        if (!is_feasible(r.metrics, constraints)) continue;
        if (!best || r.metrics.hw_cost < best->metrics.hw_cost ||
            (r.metrics.hw_cost == best->metrics.hw_cost &&
             r.metrics.nav_time_s < best->metrics.nav_time_s))
            best = &r;
    }
    return best;
}

bool has_flag(const MemoryRecord& r, IssueType t) {
    return r.bottleneck_flags.count(t) > 0;
}

// L1 distance on axis indices; used by the guided feasibility estimate.
int index_distance(const std::array<int, 3>& a, const std::array<int, 3>& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

// Frequencies render with an explicit decimal ("1.0", not "1").
std::string format_ghz(double v) {
    std::ostringstream os;
    os << v;
    if (os.str().find('.') == std::string::npos) return os.str() + ".0";
    return os.str();
}

} // namespace

// ---------------------------------------------------------------- exhaustive

Proposal ExhaustiveStrategy::propose(const History& history, const CombinedReport*,
                                     const DesignSpace& space, Rng&, bool) {
    auto seen = evaluated_points(history);
    for (const auto& p : enumerate(space)) {
        if (!seen.count(p)) return Proposal{p, "next point in enumeration order", false};
    }
    Proposal done;
    done.point = enumerate(space).back();
    done.rationale = "all points evaluated";
    done.terminate = true;
    return done;
}

// -------------------------------------------------------------------- random

Proposal RandomStrategy::propose(const History& history, const CombinedReport*,
                                 const DesignSpace& space, Rng& rng, bool) {
    auto seen = evaluated_points(history);
    std::vector<DesignPoint> remaining;
    for (const auto& p : enumerate(space))
        if (!seen.count(p)) remaining.push_back(p);
    if (remaining.empty()) {
        Proposal done;
        done.point = enumerate(space).back();
        done.rationale = "space exhausted";
        done.terminate = true;
        return done;
    }
    std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
    return Proposal{remaining[pick(rng)], "uniform random draw", false};
}

// ------------------------------------------------------------------- genetic

std::array<int, 3> one_point_crossover(const std::array<int, 3>& a,
                                       const std::array<int, 3>& b, int cut) {
    std::array<int, 3> child;
    for (int g = 0; g < 3; ++g)
        child[static_cast<std::size_t>(g)] =
            g < cut ? a[static_cast<std::size_t>(g)] : b[static_cast<std::size_t>(g)];
    return child;
}

std::vector<DesignPoint> genetic_step(
    const std::vector<std::pair<DesignPoint, double>>& population, const GAParams& params,
    const DesignSpace& space, Rng& rng) {
    using Genes = std::array<int, 3>;
    std::vector<std::pair<Genes, double>> pop;
    for (const auto& [point, fitness] : population) {
        auto idx = space.index_of(point);
        if (!idx) continue;  // foreign points cannot be encoded
        pop.push_back({*idx, fitness});
    }
    if (pop.empty()) return {};

    auto sizes = space.axis_sizes();
    auto tournament = [&]() -> const Genes& {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::size_t best = pick(rng);
        for (int i = 1; i < params.tournament_size; ++i) {
            std::size_t c = pick(rng);
            if (pop[c].second > pop[best].second) best = c;
        }
        return pop[best].first;
    };

    std::vector<DesignPoint> next;
    // Elitism: the best individuals carry over unchanged.
    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pop[a].second > pop[b].second; });
    for (int e = 0; e < params.elitism && e < static_cast<int>(order.size()); ++e)
        next.push_back(space.point_at(pop[order[static_cast<std::size_t>(e)]].first));

    std::uniform_int_distribution<int> cut_dist(1, 2);  // one-point cut after gene 1 or 2
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(next.size()) < params.population_size) {
        Genes a = tournament();
        Genes b = tournament();
        Genes child = one_point_crossover(a, b, cut_dist(rng));
        for (int g = 0; g < 3; ++g) {
            int axis_size = sizes[static_cast<std::size_t>(g)];
            if (axis_size < 2) continue;  // no other index exists
            if (unit(rng) < params.mutation_prob) {
                std::uniform_int_distribution<int> other(0, axis_size - 2);
                int v = other(rng);
                if (v >= child[static_cast<std::size_t>(g)]) ++v;
                child[static_cast<std::size_t>(g)] = v;
            }
        }
        next.push_back(space.point_at(child));
    }
    return next;
}

GeneticStrategy::GeneticStrategy(GAParams params, const Constraints& constraints,
                                 double timeout_s)
    : params_(params), constraints_(constraints), timeout_s_(timeout_s) {}

double GeneticStrategy::fitness_of(const Metrics& m) const {
    double fitness = -m.nav_time_s;
    if (!is_feasible(m, constraints_))
        fitness -= params_.infeasible_penalty_timeouts * timeout_s_;
    return fitness;
}

Proposal GeneticStrategy::propose(const History& history, const CombinedReport*,
                                  const DesignSpace& space, Rng& rng, bool) {
    auto seen = evaluated_points(history);

    if (!initialized_) {
        initialized_ = true;
        auto all = enumerate(space);
        std::vector<DesignPoint> pool = all;
        generation_.clear();
        for (int i = 0; i < params_.population_size && !pool.empty(); ++i) {
            std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
            std::size_t k = pick(rng);
            generation_.push_back(pool[k]);
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        }
        pending_ = generation_;
    }

    for (int safety = 0; safety < 64; ++safety) {
        // Serve the next individual of the current generation that still
        // needs an evaluation.
        while (!pending_.empty()) {
            DesignPoint p = pending_.front();
            pending_.erase(pending_.begin());
            if (!seen.count(p))
                return Proposal{p, "genetic generation member", false};
        }
        // Generation fully known: breed the next one from history fitness.
        std::vector<std::pair<DesignPoint, double>> scored;
        for (const auto& p : generation_) {
            for (const auto& r : history) {
                if (r.point == p) {
                    scored.push_back({p, fitness_of(r.metrics)});
                    break;
                }
            }
        }
        if (scored.empty()) break;
        generation_ = genetic_step(scored, params_, space, rng);
        pending_ = generation_;
    }

    Proposal done;
    done.point = history.empty() ? enumerate(space).front() : history.back().point;
    done.rationale = "generation converged to evaluated points";
    done.terminate = true;
    return done;
}

// -------------------------------------------------------------------- guided

Proposal guided_rules(const MemoryRecord& last, const History& history,
                      const DesignSpace& space, const Constraints& constraints,
                      const GuidedParams& params, GuidedState& state,
                      const std::vector<DetectedIssue>* issues) {
    auto seen = evaluated_points(history);
    auto sizes = space.axis_sizes();
    auto last_idx = space.index_of(last.point);
    if (!last_idx) throw ConfigError("guided_rules: last point not in the active space");

    auto unseen = [&](const std::array<int, 3>& idx) {
        return !seen.count(space.point_at(idx));
    };

    auto terminate_best = [&]() {
        Proposal done;
        const MemoryRecord* best = best_feasible(history, constraints);
        done.point = best ? best->point : last.point;
        done.rationale = best ? "no admissible move left; best known feasible point"
                              : "no admissible move left and no feasible point known";
        done.terminate = true;
        return done;
    };

    // R1: starved for compute. Bump cores, and frequency on alternate
    // firings; slide along the step direction past already-evaluated points.
    bool r1 = !last.metrics.goal_reached ||
              last.metrics.ctrl_rate_hz <= constraints.min_ctrl_rate_hz ||
              has_flag(last, IssueType::cpu_bound);
    if (r1) {
        std::ostringstream why;
        why << "more compute needed:";
        if (!last.metrics.goal_reached) why << " navigation incomplete;";
        if (last.metrics.ctrl_rate_hz <= constraints.min_ctrl_rate_hz)
            why << " control rate " << last.metrics.ctrl_rate_hz << " Hz at or below the "
                << constraints.min_ctrl_rate_hz << " Hz bound;";
        if (has_flag(last, IssueType::cpu_bound)) why << " CPU-bound subscriber callbacks;";

        for (int attempt = 0; attempt < 2; ++attempt) {
            bool bump_freq = state.bump_frequency_next;
            int axis = bump_freq ? 1 : 0;
            int step = bump_freq ? params.freq_step_indices : params.core_step_indices;
            auto idx = *last_idx;
            while (idx[static_cast<std::size_t>(axis)] < sizes[static_cast<std::size_t>(axis)] - 1) {
                idx[static_cast<std::size_t>(axis)] = std::min(
                    idx[static_cast<std::size_t>(axis)] + step,
                    sizes[static_cast<std::size_t>(axis)] - 1);
                if (unseen(idx)) {
                    state.bump_frequency_next = !bump_freq;
                    why << (bump_freq ? " stepping frequency up." : " stepping cores up.");
                    return Proposal{space.point_at(idx), why.str(), false};
                }
            }
            // This axis is exhausted upward; try the other one.
            state.bump_frequency_next = !bump_freq;
        }
        return terminate_best();
    }

    // R2: mismatched input rates; move the LiDAR rate toward the
    // bottleneck-reducing value (down when its topic is the fast side, up
    // otherwise).
    if (has_flag(last, IssueType::frequency_bound) && sizes[2] > 1) {
        bool lidar_is_fast = true;
        if (issues) {
            for (const auto& issue : *issues) {
                if (const auto* f = std::get_if<FrequencyBoundIssue>(&issue)) {
                    lidar_is_fast = f->fast_topic.find("lidar") != std::string::npos;
                    break;
                }
            }
        }
        auto idx = *last_idx;
        int li = idx[2];
        int target = lidar_is_fast ? std::max(0, li - 1) : std::min(sizes[2] - 1, li + 1);
        if (target != li) {
            idx[2] = target;
            if (unseen(idx))
                return Proposal{space.point_at(idx),
                                "input rates mismatched: moving the LiDAR rate", false};
        }
        return terminate_best();
    }

    // R3: feasible and clean; walk cost down along the axis whose reduction
    // the nearest evaluated neighbor predicts stays feasible, preferring the
    // larger saving.
    bool clean = last.bottleneck_flags.empty();
    if (is_feasible(last.metrics, constraints) && clean) {
        struct Candidate {
            std::array<int, 3> idx;
            double saving;
        };
        std::vector<Candidate> candidates;
        auto try_axis = [&](int axis) {
            auto idx = *last_idx;
            if (idx[static_cast<std::size_t>(axis)] == 0) return;
            idx[static_cast<std::size_t>(axis)] -= 1;
            DesignPoint p = space.point_at(idx);
            if (seen.count(p)) return;
            candidates.push_back({idx, hardware_cost(last.point) - hardware_cost(p)});
        };
        try_axis(0);
        try_axis(1);
        // The LiDAR rate carries no hardware cost, so its down-step sorts
        // last; it frees pipeline capacity when the cost axes are blocked.
        try_axis(2);

        // Feasibility estimate: nearest evaluated neighbor by index distance
        // (ties toward the most recent record).
        auto predicted_feasible = [&](const std::array<int, 3>& idx) {
            const MemoryRecord* nearest = nullptr;
            int best = std::numeric_limits<int>::max();
            for (const auto& r : history) {
                auto ri = space.index_of(r.point);
                if (!ri) continue;
                int d = index_distance(idx, *ri);
                if (d <= best) {
                    best = d;
                    nearest = &r;
                }
            }
            return nearest && is_feasible(nearest->metrics, constraints);
        };

        std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.saving != b.saving) return a.saving > b.saving;
            return space.point_at(a.idx) < space.point_at(b.idx);
        });
        for (const auto& c : candidates) {
            if (predicted_feasible(c.idx))
                return Proposal{space.point_at(c.idx),
                                "feasible with no bottleneck flags: stepping cost down", false};
        }
    }

    // R4: nothing admissible; re-propose the best known feasible point and
    // stop.
    return terminate_best();
}

GuidedStrategy::GuidedStrategy(GuidedParams params, const Constraints& constraints)
    : params_(params), constraints_(constraints) {}

Proposal GuidedStrategy::propose(const History& history, const CombinedReport* last_report,
                                 const DesignSpace& space, Rng& rng, bool) {
    if (history.empty()) {
        // Seeded random start, like the baseline it is compared against.
        auto all = enumerate(space);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        return Proposal{all[pick(rng)], "random initial design point", false};
    }
    const std::vector<DetectedIssue>* issues =
        last_report ? &last_report->performance.detected_issues : nullptr;
    return guided_rules(history.back(), history, space, constraints_, params_, state_, issues);
}

// ----------------------------------------------------------------------- llm

CompletionBackend scripted_backend(std::vector<std::string> transcript) {
    auto state = std::make_shared<std::pair<std::vector<std::string>, std::size_t>>(
        std::move(transcript), 0);
    return [state](const std::string&, const std::string&) -> std::string {
        if (state->first.empty()) return "";
        std::size_t i = std::min(state->second, state->first.size() - 1);
        ++state->second;
        return state->first[i];
    };
}

CompletionBackend http_backend(const std::string& endpoint_url) {
    return [endpoint_url](const std::string& system, const std::string& prompt) -> std::string {
        // Single-turn prompt/completion exchange:
        //   POST <endpoint>  {"system": ..., "prompt": ...}
        //   -> {"completion": ...}
        auto scheme_end = endpoint_url.find("://");
        std::string rest = scheme_end == std::string::npos
                               ? endpoint_url
                               : endpoint_url.substr(scheme_end + 3);
        auto slash = rest.find('/');
        std::string host = slash == std::string::npos ? rest : rest.substr(0, slash);
        std::string path = slash == std::string::npos ? "/" : rest.substr(slash);
        httplib::Client client(host);
        client.set_read_timeout(60, 0);
        nlohmann::json body{{"system", system}, {"prompt", prompt}};
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res || res->status != 200)
            throw ExecutorError("LLM endpoint request failed: " + endpoint_url);
        return nlohmann::json::parse(res->body).value("completion", "");
    };
}

std::string reference_line(const MemoryRecord& rec) {
    std::ostringstream os;
    os << "number_of_cores = " << rec.point.cores
       << ", core_frequency = " << format_ghz(rec.point.core_frequency_ghz)
       << ", lidar_frequency = " << rec.point.lidar_hz
       << " -> navigation_time = " << rec.metrics.nav_time_s
       << ", car_trajectory_normalized_score = ";
    if (rec.metrics.deviation_score)
        os << *rec.metrics.deviation_score;
    else
        os << "n/a";
    os << ", control_command_issue_rates = " << rec.metrics.ctrl_rate_hz
       << ", hardware_cost = " << rec.metrics.hw_cost;
    return os.str();
}

std::pair<std::string, std::string> assemble_prompts(
    const std::string& task_name, const DesignSpace& space,
    const std::vector<MemoryRecord>& references, const MemoryRecord* last,
    const CombinedReport* last_report) {
    std::ostringstream sys;
    sys << "You are a design space exploration agent.\n"
        << "Your job is to search the design space and recommend hardware/software "
           "configurations that meet the design objectives. The objectives are:\n"
        << "- Minimize navigation time\n"
        << "- Minimize vehicle trajectory deviation score\n"
        << "- Maximize control command issue rates\n"
        << "The application scenario is fixed to a " << task_name << " task.\n\n"
        << "The design space is defined by three design parameters as follows:\n"
        << "- number_of_cores in {";
    for (std::size_t i = 0; i < space.core_counts.size(); ++i)
        sys << (i ? ", " : "") << space.core_counts[i];
    sys << "}\n- core_frequency (GHz) in {";
    for (std::size_t i = 0; i < space.frequencies_ghz.size(); ++i)
        sys << (i ? ", " : "") << format_ghz(space.frequencies_ghz[i]);
    sys << "}\n- LiDAR data subscription frequency (Hz) in {";
    for (std::size_t i = 0; i < space.lidar_rates_hz.size(); ++i)
        sys << (i ? ", " : "") << space.lidar_rates_hz[i];
    sys << "}\n\n"
        << "Your output is a design point expressed as a tuple of the form "
           "(number_of_cores, core_frequency, LiDAR_frequency), and your explanation of "
           "your predicted design point.\n";

    std::ostringstream ins;
    if (last) {
        ins << "Here is the design point in simulation:\n"
            << "- number_of_cores: " << last->point.cores << "\n"
            << "- core_frequency: " << format_ghz(last->point.core_frequency_ghz)
            << " GHz\n"
            << "- LiDAR frequency: " << last->point.lidar_hz << " Hz\n\n"
            << "Here is the performance data after simulation:\n"
            << "- navigation time: " << last->metrics.nav_time_s << " seconds\n"
            << "- car trajectory normalized score: ";
        if (last->metrics.deviation_score)
            ins << *last->metrics.deviation_score << "\n";
        else
            ins << "n/a (navigation incomplete)\n";
        ins << "- control command issue rates: " << last->metrics.ctrl_rate_hz << " Hz\n";
        if (!last->bottleneck_flags.empty()) {
            ins << "- bottleneck flags:";
            for (const auto& f : last->bottleneck_flags) ins << " " << to_string(f);
            ins << "\n";
        }
        if (last_report && !last_report->text.empty())
            ins << "\n" << last_report->text << "\n";
        ins << "\n";
    }
    ins << "Here are some design points you can refer:\n";
    int n = 1;
    for (const auto& ref : references) {
        ins << "# Reference design point " << n++ << ":\n" << reference_line(ref) << "\n\n";
    }
    ins << "Please predict the next design point for the next simulation and provide your "
           "reasoning.\n";
    return {sys.str(), ins.str()};
}

Proposal parse_llm_proposal(const std::string& response_text, const DesignSpace& space) {
    // Labeled form: number_of_cores = 23, core_frequency = 1.5, lidar_frequency = 7
    static const std::regex labeled(
        R"(number_of_cores\s*[=:]\s*(\d+)[\s\S]{0,120}?core_frequency\s*[=:]\s*([0-9]+(?:\.[0-9]+)?)[\s\S]{0,120}?lidar_frequency\s*[=:]\s*(\d+))",
        std::regex::icase);
    // Tuple form: (16 cores, 1.8 GHz, 14 Hz ...)
    static const std::regex tuple(
        R"(\(\s*(\d+)\s*cores?\s*,\s*([0-9]+(?:\.[0-9]+)?)\s*GHz\s*,\s*(\d+)\s*Hz[^)]*\))",
        std::regex::icase);

    std::smatch m;
    if (!std::regex_search(response_text, m, tuple) &&
        !std::regex_search(response_text, m, labeled))
        throw UnparseableResponseError("no design-point tuple found in response");

    int cores = std::stoi(m[1].str());
    double freq = std::stod(m[2].str());
    int lidar = std::stoi(m[3].str());
    Proposal p;
    p.point = space.clamp(cores, freq, lidar);
    p.rationale = response_text;
    return p;
}

LlmStrategy::LlmStrategy(CompletionBackend backend, const Constraints& constraints,
                         std::string task_name)
    : backend_(std::move(backend)), constraints_(constraints),
      task_name_(std::move(task_name)) {}

Proposal LlmStrategy::propose(const History& history, const CombinedReport* last_report,
                              const DesignSpace& space, Rng&, bool format_reminder) {
    auto references = select_references(history, k_recent_, constraints_);
    const MemoryRecord* last = history.empty() ? nullptr : &history.back();
    auto [system_text, instruction] = assemble_prompts(task_name_, space, references, last,
                                                       last_report);
    if (format_reminder)
        instruction +=
            "\nReminder: answer with exactly one design point tuple of the form "
            "(<cores> cores, <frequency> GHz, <lidar> Hz).\n";
    ++completions_requested_;
    std::string reply = backend_(system_text, instruction);
    return parse_llm_proposal(reply, space);
}

std::unique_ptr<Strategy> make_strategy(const std::string& name, const GAParams& ga,
                                        const GuidedParams& guided,
                                        const Constraints& constraints, double timeout_s,
                                        CompletionBackend llm_backend,
                                        const std::string& task_name) {
    if (name == "exhaustive") return std::make_unique<ExhaustiveStrategy>();
    if (name == "random") return std::make_unique<RandomStrategy>();
    if (name == "ga") return std::make_unique<GeneticStrategy>(ga, constraints, timeout_s);
    if (name == "guided") return std::make_unique<GuidedStrategy>(guided, constraints);
    if (name == "llm") {
        if (!llm_backend) throw ConfigError("llm strategy needs a completion backend");
        return std::make_unique<LlmStrategy>(std::move(llm_backend), constraints, task_name);
    }
    throw ConfigError("unknown strategy '" + name + "'");
}

} // namespace dse
