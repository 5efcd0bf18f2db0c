#include "dse/trace_analysis.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <sstream>

#include "dse/errors.hpp"
#include "json.hpp"

namespace dse {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kMinRateWindowS = 0.5;

std::optional<EventKind> kind_from_string(const std::string& s) {
    if (s == "publish") return EventKind::publish;
    if (s == "subscribe_callback_start") return EventKind::subscribe_callback_start;
    if (s == "subscribe_callback_end") return EventKind::subscribe_callback_end;
    if (s == "nav_start") return EventKind::nav_start;
    if (s == "nav_goal_reached") return EventKind::nav_goal_reached;
    return std::nullopt;
}

bool is_nav(EventKind k) {
    return k == EventKind::nav_start || k == EventKind::nav_goal_reached;
}

// (count-1)/span over the given publish timestamps.
double rate_from_timestamps(const std::vector<std::int64_t>& ts) {
    if (ts.size() < 2) return 0.0;
    double span_s = static_cast<double>(ts.back() - ts.front()) / 1e9;
    if (span_s < kMinRateWindowS) return 0.0;
    return static_cast<double>(ts.size() - 1) / span_s;
}

// Timestamps per (node, topic) of callback_start events: the arrival rate is
// what backpressure affects, so subscriber rates are measured from starts.
std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>>
callback_start_times(std::span<const TraceEvent> events) {
    std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>> out;
    for (const auto& e : events)
        if (e.kind == EventKind::subscribe_callback_start)
            out[{e.node, e.topic}].push_back(e.t_ns);
    return out;
}

} // namespace

std::string to_string(EventKind k) {
    switch (k) {
    case EventKind::publish: return "publish";
    case EventKind::subscribe_callback_start: return "subscribe_callback_start";
    case EventKind::subscribe_callback_end: return "subscribe_callback_end";
    case EventKind::nav_start: return "nav_start";
    case EventKind::nav_goal_reached: return "nav_goal_reached";
    }
    return "?";
}

std::string to_string(IssueType t) {
    return t == IssueType::cpu_bound ? "cpu_bound" : "frequency_bound";
}

std::string to_line(const TraceEvent& e) {
    ordered_json j;
    j["t_ns"] = e.t_ns;
    j["kind"] = to_string(e.kind);
    j["node"] = e.node;
    j["tid"] = e.tid;
    if (!is_nav(e.kind)) j["topic"] = e.topic;
    return j.dump();
}

std::vector<TraceEvent> parse_trace(std::istream& in) {
    std::vector<TraceEvent> events;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const ordered_json::parse_error& e) {
            throw TraceParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        TraceEvent e;
        try {
            e.t_ns = j.at("t_ns").get<std::int64_t>();
            auto kind = kind_from_string(j.at("kind").get<std::string>());
            if (!kind) throw TraceParseError("unknown kind '" + j.at("kind").get<std::string>() + "'", line_no);
            e.kind = *kind;
            e.node = j.at("node").get<std::string>();
            e.tid = j.at("tid").get<int>();
            if (!is_nav(e.kind)) {
                if (!j.contains("topic"))
                    throw TraceParseError("missing topic on " + to_string(e.kind) + " event", line_no);
                e.topic = j.at("topic").get<std::string>();
            }
        } catch (const ordered_json::exception& ex) {
            throw TraceParseError(std::string("missing or mistyped field: ") + ex.what(), line_no);
        }
        if (e.t_ns < 0) throw TraceParseError("negative timestamp", line_no);
        events.push_back(std::move(e));
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const TraceEvent& a, const TraceEvent& b) { return a.t_ns < b.t_ns; });
    return events;
}

std::vector<TraceEvent> parse_trace(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

std::map<std::string, double> topic_publish_rates(std::span<const TraceEvent> events) {
    std::map<std::string, std::vector<std::int64_t>> per_topic;
    for (const auto& e : events)
        if (e.kind == EventKind::publish) per_topic[e.topic].push_back(e.t_ns);
    std::map<std::string, double> rates;
    for (const auto& [topic, ts] : per_topic) rates[topic] = rate_from_timestamps(ts);
    return rates;
}

std::map<std::string, LatencyStats> callback_latencies(std::span<const TraceEvent> events,
                                                       int* unmatched) {
    // FIFO matching per (node, tid, topic).
    std::map<std::tuple<std::string, int, std::string>, std::deque<std::int64_t>> open;
    std::map<std::string, std::vector<double>> durations;
    int unmatched_count = 0;
    for (const auto& e : events) {
        if (e.kind == EventKind::subscribe_callback_start) {
            open[{e.node, e.tid, e.topic}].push_back(e.t_ns);
        } else if (e.kind == EventKind::subscribe_callback_end) {
            auto it = open.find({e.node, e.tid, e.topic});
            if (it == open.end() || it->second.empty()) {
                ++unmatched_count;  // end without start
                continue;
            }
            std::int64_t start = it->second.front();
            it->second.pop_front();
            durations[e.node].push_back(static_cast<double>(e.t_ns - start) / 1e9);
        }
    }
    for (const auto& [key, starts] : open) unmatched_count += static_cast<int>(starts.size());
    if (unmatched) *unmatched = unmatched_count;

    std::map<std::string, LatencyStats> out;
    for (const auto& [node, ds] : durations) {
        LatencyStats st;
        double sum = 0.0;
        for (double d : ds) {
            sum += d;
            st.max_s = std::max(st.max_s, d);
        }
        st.avg_s = sum / static_cast<double>(ds.size());
        out[node] = st;
    }
    return out;
}

double extract_ctrl_rate(std::span<const TraceEvent> events) {
    auto rates = topic_publish_rates(events);
    auto it = rates.find(kCtrlTopic);
    return it == rates.end() ? 0.0 : it->second;
}

std::optional<double> extract_nav_time(std::span<const TraceEvent> events) {
    std::optional<std::int64_t> start, goal;
    for (const auto& e : events) {
        if (e.kind == EventKind::nav_start) {
            if (start) throw AmbiguousNavEventError("duplicate nav_start event");
            start = e.t_ns;
        } else if (e.kind == EventKind::nav_goal_reached) {
            if (goal) throw AmbiguousNavEventError("duplicate nav_goal_reached event");
            goal = e.t_ns;
        }
    }
    if (!start || !goal) return std::nullopt;
    return static_cast<double>(*goal - *start) / 1e9;
}

IssueType issue_type(const DetectedIssue& issue) {
    return std::holds_alternative<CpuBoundIssue>(issue) ? IssueType::cpu_bound
                                                        : IssueType::frequency_bound;
}

double cpu_bound_threshold(double publisher_hz) {
    if (publisher_hz < 1.0) return 0.7;
    if (publisher_hz < 10.0) return 0.8;
    return 0.9;
}

std::vector<DetectedIssue> detect_cpu_bound(std::span<const TraceEvent> events) {
    auto pub_rates = topic_publish_rates(events);
    auto sub_starts = callback_start_times(events);
    std::vector<DetectedIssue> issues;
    for (const auto& [key, ts] : sub_starts) {
        const auto& [node, topic] = key;
        auto pub_it = pub_rates.find(topic);
        if (pub_it == pub_rates.end() || pub_it->second <= 0.0) continue;
        double p = pub_it->second;
        double s = rate_from_timestamps(ts);
        if (s / p < cpu_bound_threshold(p))
            issues.push_back(CpuBoundIssue{node, topic, p, s});
    }
    return issues;
}

std::vector<DetectedIssue> detect_frequency_bound(std::span<const TraceEvent> events,
                                                  const NodeInputs& node_inputs) {
    auto pub_rates = topic_publish_rates(events);
    std::vector<DetectedIssue> issues;
    for (const auto& [node, topics] : node_inputs) {
        if (topics.size() < 2) continue;
        std::vector<std::pair<double, std::string>> inputs;  // (rate, topic)
        for (const auto& t : topics) {
            auto it = pub_rates.find(t);
            inputs.emplace_back(it == pub_rates.end() ? 0.0 : it->second, t);
        }
        // Ties broken lexicographically so the reported pair is deterministic.
        auto slow = *std::min_element(inputs.begin(), inputs.end());
        auto fast = *std::max_element(inputs.begin(), inputs.end(),
                                      [](const auto& a, const auto& b) {
                                          if (a.first != b.first) return a.first < b.first;
                                          return a.second > b.second;
                                      });
        bool mismatched = slow.first > 0.0 ? (fast.first / slow.first > kFrequencyBoundRatio)
                                           : fast.first > 0.0;
        if (mismatched)
            issues.push_back(
                FrequencyBoundIssue{node, slow.second, slow.first, fast.second, fast.first});
    }
    return issues;
}

PerformanceReport build_report(std::span<const TraceEvent> events,
                               const NodeInputs& node_inputs) {
    PerformanceReport r;
    r.node_callback_latencies = callback_latencies(events, &r.unmatched_callback_warnings);
    r.topic_publish_rates = topic_publish_rates(events);
    r.ctrl_rate_hz = extract_ctrl_rate(events);
    r.nav_time_s = extract_nav_time(events);
    r.detected_issues = detect_cpu_bound(events);
    auto freq = detect_frequency_bound(events, node_inputs);
    r.detected_issues.insert(r.detected_issues.end(), freq.begin(), freq.end());
    for (const auto& issue : r.detected_issues) r.bottleneck_flags.insert(issue_type(issue));
    return r;
}

std::string report_to_json(const PerformanceReport& r, int indent) {
    ordered_json j;
    ordered_json latencies = ordered_json::object();
    for (const auto& [node, st] : r.node_callback_latencies) {
        latencies[node] = {{"avg_callback_latency_sec", st.avg_s},
                           {"max_callback_latency_sec", st.max_s}};
    }
    j["node_callback_latencies"] = latencies;
    ordered_json rates = ordered_json::object();
    for (const auto& [topic, hz] : r.topic_publish_rates) rates[topic] = hz;
    j["topic_publish_rates"] = rates;
    j["ctrl_rate_hz"] = r.ctrl_rate_hz;
    if (r.nav_time_s)
        j["nav_time_s"] = *r.nav_time_s;
    else
        j["nav_time_s"] = nullptr;
    ordered_json issues = ordered_json::array();
    for (const auto& issue : r.detected_issues) {
        ordered_json ji;
        if (const auto* c = std::get_if<CpuBoundIssue>(&issue)) {
            ji["type"] = "cpu_bound";
            ji["node"] = c->node;
            ji["topic"] = c->topic;
            ji["publisher_hz"] = c->publisher_hz;
            ji["subscriber_hz"] = c->subscriber_hz;
        } else {
            const auto& f = std::get<FrequencyBoundIssue>(issue);
            ji["type"] = "frequency_bound";
            ji["node"] = f.node;
            ji["slow_topic"] = f.slow_topic;
            ji["slow_hz"] = f.slow_hz;
            ji["fast_topic"] = f.fast_topic;
            ji["fast_hz"] = f.fast_hz;
        }
        issues.push_back(std::move(ji));
    }
    j["detected_issues"] = issues;
    ordered_json flags = ordered_json::array();
    for (const auto& f : r.bottleneck_flags) flags.push_back(to_string(f));
    j["bottleneck_flags"] = flags;
    if (r.unmatched_callback_warnings > 0)
        j["unmatched_callback_warnings"] = r.unmatched_callback_warnings;
    return j.dump(indent);
}

} // namespace dse
