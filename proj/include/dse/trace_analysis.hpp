#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dse {

enum class EventKind {
    publish,
    subscribe_callback_start,
    subscribe_callback_end,
    nav_start,
    nav_goal_reached,
};

std::string to_string(EventKind k);

// One line of the trace file. `topic` is empty for nav events.
struct TraceEvent {
    std::int64_t t_ns = 0;
    EventKind kind = EventKind::publish;
    std::string node;
    int tid = 0;
    std::string topic;

    bool operator==(const TraceEvent&) const = default;
};

// Serializes one event as the flat one-line JSON record
// {"t_ns":..,"kind":..,"node":..,"tid":..,"topic":..} (topic omitted for
// nav events).
std::string to_line(const TraceEvent& e);

// Parses one record per line; returns events sorted by t_ns (stable).
// Throws TraceParseError with the 1-based line number on malformed input.
std::vector<TraceEvent> parse_trace(std::istream& in);
std::vector<TraceEvent> parse_trace(const std::string& text);

// Which topics each node subscribes to. For the synthetic pipeline this is
// derived from the fixed topology; external traces must supply it.
using NodeInputs = std::map<std::string, std::vector<std::string>>;

// (count-1)/span estimator; topics with < 2 publishes or a window under
// 0.5 s report 0.
std::map<std::string, double> topic_publish_rates(std::span<const TraceEvent> events);

struct LatencyStats {
    double avg_s = 0.0;
    double max_s = 0.0;

    bool operator==(const LatencyStats&) const = default;
};

// Per-node average/maximum of (callback_end - callback_start), matched per
// (node, tid, topic). Unmatched starts are ignored; their count is written
// to *unmatched when given.
std::map<std::string, LatencyStats> callback_latencies(std::span<const TraceEvent> events,
                                                       int* unmatched = nullptr);

// Publish rate of the control command topic.
inline constexpr const char* kCtrlTopic = "/control/command/control_cmd";
double extract_ctrl_rate(std::span<const TraceEvent> events);

// t(nav_goal_reached) - t(nav_start) in seconds; absent when either event is
// missing. Duplicate nav events raise AmbiguousNavEventError.
std::optional<double> extract_nav_time(std::span<const TraceEvent> events);

enum class IssueType { cpu_bound, frequency_bound };

std::string to_string(IssueType t);

// A subscriber processes a topic materially slower than its publisher emits.
struct CpuBoundIssue {
    std::string node;
    std::string topic;
    double publisher_hz = 0.0;
    double subscriber_hz = 0.0;

    bool operator==(const CpuBoundIssue&) const = default;
};

// A node's input topics arrive at badly mismatched rates.
struct FrequencyBoundIssue {
    std::string node;
    std::string slow_topic;
    double slow_hz = 0.0;
    std::string fast_topic;
    double fast_hz = 0.0;

    bool operator==(const FrequencyBoundIssue&) const = default;
};

using DetectedIssue = std::variant<CpuBoundIssue, FrequencyBoundIssue>;

IssueType issue_type(const DetectedIssue& issue);

// The deficit threshold gets stricter as the publish rate grows.
double cpu_bound_threshold(double publisher_hz);

inline constexpr double kFrequencyBoundRatio = 10.0;

// Flags subscribing nodes whose callback rate S on a topic satisfies
// S/P < cpu_bound_threshold(P). Topics without subscriber callbacks are not
// evaluated.
std::vector<DetectedIssue> detect_cpu_bound(std::span<const TraceEvent> events);

// Flags nodes with >= 2 input topics whose max/min input publish-rate ratio
// strictly exceeds kFrequencyBoundRatio.
std::vector<DetectedIssue> detect_frequency_bound(std::span<const TraceEvent> events,
                                                  const NodeInputs& node_inputs);

// The Fig.-9-shaped analysis output.
struct PerformanceReport {
    std::map<std::string, LatencyStats> node_callback_latencies;
    std::map<std::string, double> topic_publish_rates;
    double ctrl_rate_hz = 0.0;
    std::optional<double> nav_time_s;
    std::vector<DetectedIssue> detected_issues;
    std::set<IssueType> bottleneck_flags;
    int unmatched_callback_warnings = 0;

    bool operator==(const PerformanceReport&) const = default;
};

PerformanceReport build_report(std::span<const TraceEvent> events,
                               const NodeInputs& node_inputs);

// JSON with the report field names, stable key order.
std::string report_to_json(const PerformanceReport& r, int indent = -1);

} // namespace dse
