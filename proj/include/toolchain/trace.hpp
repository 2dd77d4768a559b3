#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolchain/errors.hpp"
#include "toolchain/tree.hpp"

namespace toolchain {

enum class TraceKind { select, expand, update, terminal, error };

inline const char* to_string(TraceKind k) {
    switch (k) {
        case TraceKind::select: return "select";
        case TraceKind::expand: return "expand";
        case TraceKind::update: return "update";
        case TraceKind::terminal: return "terminal";
        case TraceKind::error: return "error";
    }
    return "?";
}

inline TraceKind trace_kind_from_string(const std::string& s) {
    if (s == "select") return TraceKind::select;
    if (s == "expand") return TraceKind::expand;
    if (s == "update") return TraceKind::update;
    if (s == "terminal") return TraceKind::terminal;
    if (s == "error") return TraceKind::error;
    throw FormatError("unknown trace kind: " + s);
}

/// One replayable search event. Update events additionally carry the new
/// node's canonical action key so a trace alone reconstructs the run.
struct TraceEvent {
    std::string run_id;
    std::uint32_t step = 0;  // strictly increasing within a run
    TraceKind kind = TraceKind::select;
    NodeId node_id = 0;
    double f = 0.0;
    double g_cum = 0.0;
    double h_cost = 0.0;
    std::uint64_t proposer_calls = 0;
    double timestamp = 0.0;  // seconds on the run clock
    std::string action_key;  // update events only
};

inline nlohmann::ordered_json to_json(const TraceEvent& e) {
    nlohmann::ordered_json j;
    j["run_id"] = e.run_id;
    j["step"] = e.step;
    j["kind"] = to_string(e.kind);
    j["node_id"] = e.node_id;
    j["f"] = e.f;
    j["g_cum"] = e.g_cum;
    j["h_cost"] = e.h_cost;
    j["calls"] = e.proposer_calls;
    j["ts"] = e.timestamp;
    if (!e.action_key.empty()) j["action_key"] = e.action_key;
    return j;
}

inline TraceEvent trace_event_from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.run_id = j.at("run_id").get<std::string>();
    e.step = j.at("step").get<std::uint32_t>();
    e.kind = trace_kind_from_string(j.at("kind").get<std::string>());
    e.node_id = j.at("node_id").get<NodeId>();
    e.f = j.at("f").get<double>();
    e.g_cum = j.at("g_cum").get<double>();
    e.h_cost = j.at("h_cost").get<double>();
    e.proposer_calls = j.at("calls").get<std::uint64_t>();
    e.timestamp = j.at("ts").get<double>();
    e.action_key = j.value("action_key", "");
    return e;
}

inline void write_trace(const std::vector<TraceEvent>& trace, std::ostream& out) {
    for (const TraceEvent& e : trace) out << to_json(e).dump() << "\n";
}

inline void write_trace_file(const std::vector<TraceEvent>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open trace file for writing: " + path);
    write_trace(trace, out);
}

inline std::vector<TraceEvent> read_trace(std::istream& in) {
    std::vector<TraceEvent> trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        trace.push_back(trace_event_from_json(nlohmann::json::parse(line)));
    }
    return trace;
}

inline std::vector<TraceEvent> read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open trace file: " + path);
    return read_trace(in);
}

}  // namespace toolchain
