#pragma once

#include <stdexcept>
#include <string>

namespace dse {

// Configuration / scenario file problems (bad syntax, bad values).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed trace input; carries the 1-based line number when known.
struct TraceParseError : std::runtime_error {
    TraceParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_number(line) {}
    long line_number;
};

// More than one nav_start / nav_goal_reached event in a trace.
struct AmbiguousNavEventError : std::runtime_error {
    explicit AmbiguousNavEventError(const std::string& what) : std::runtime_error(what) {}
};

// Goal projects before start on an open centerline.
struct NoPathError : std::runtime_error {
    explicit NoPathError(const std::string& what) : std::runtime_error(what) {}
};

// A strategy was asked for a proposal but every point is already evaluated
// and it did not terminate.
struct ExhaustedSpaceError : std::runtime_error {
    explicit ExhaustedSpaceError(const std::string& what) : std::runtime_error(what) {}
};

// LLM backend returned text that does not contain a recognizable design point.
struct UnparseableResponseError : std::runtime_error {
    explicit UnparseableResponseError(const std::string& what) : std::runtime_error(what) {}
};

// Executor could not run the command plan.
struct ExecutorError : std::runtime_error {
    explicit ExecutorError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dse
