#pragma once

#include <string>
#include <vector>

#include "dse/design_space.hpp"
#include "dse/trace_analysis.hpp"
#include "dse/trajectory_analysis.hpp"

namespace dse {

// One long-term-memory entry: an evaluated design point with its metrics,
// deciphered flags and the proposing strategy's rationale.
struct MemoryRecord {
    int iteration = 0;  // 1-based
    DesignPoint point;
    Metrics metrics;
    std::set<IssueType> bottleneck_flags;
    NavStatus verdict_status = NavStatus::navigation_incomplete;
    std::string verdict_narrative;
    std::string rationale;
};

using History = std::vector<MemoryRecord>;

// The merged output of the two deciphering analyses for one evaluation:
// a human-readable summary plus the structured pieces that the reference
// selection and prompt assembly consume.
struct CombinedReport {
    std::string text;
    PerformanceReport performance;
    TrajectoryVerdict verdict;
    Metrics metrics;
};

} // namespace dse
