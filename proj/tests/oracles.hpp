#pragma once

// Test-only reference implementations, kept independent of the library code
// they check. The brute-force LCS enumerates subsequences outright; the tree
// enumerator walks a scripted action space exhaustively and prices every
// terminal path with its own counting.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toolchain/action.hpp"
#include "toolchain/rng.hpp"
#include "toolchain/scripted.hpp"
#include "toolchain/task.hpp"
#include "toolchain/trace.hpp"
#include "toolchain/tree.hpp"

namespace oracles {

/// Longest common subsequence by enumerating every subsequence of a (2^|a|)
/// and testing it against b. Only usable for short sequences.
template <class T>
std::size_t brute_force_lcs(const std::vector<T>& a, const std::vector<T>& b) {
    std::size_t best = 0;
    const std::size_t n = a.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::size_t bi = 0, len = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask & (1u << i))) continue;
            while (bi < b.size() && !(b[bi] == a[i])) ++bi;
            if (bi == b.size()) {
                len = 0;
                break;
            }
            ++bi;
            ++len;
        }
        best = std::max(best, len);
    }
    return best;
}

inline std::size_t brute_force_lcs_chars(const std::string& a, const std::string& b) {
    return brute_force_lcs(std::vector<char>(a.begin(), a.end()),
                           std::vector<char>(b.begin(), b.end()));
}

/// One terminal path of the exhaustive tree walk with its cumulative cost as
/// the oracle prices it: sum over steps of (1 - class_count/k), classes
/// counted from a fresh scripted backend so no search code is involved.
struct EnumeratedPath {
    std::vector<std::string> keys;
    double g = 0.0;
};

/// Walk every class-labelled branch of the scripted action space to
/// max_depth, returning all paths that end in a finish action. memory-free
/// pricing (g1 absent), matching a run with no memory store.
inline std::vector<EnumeratedPath> enumerate_terminal_paths(
    const toolchain::Script& script, const toolchain::TaskSpec& task, int k, int max_depth,
    std::string_view finish_token = toolchain::kDefaultFinishToken) {
    using namespace toolchain;
    std::vector<EnumeratedPath> found;
    ScriptedBackend backend(script);  // fresh instance: draw counters all zero

    struct Item {
        std::vector<ActionRecord> history;
        double g;
    };
    std::vector<Item> queue{{{}, 0.0}};
    while (!queue.empty()) {
        Item item = std::move(queue.back());
        queue.pop_back();
        if (static_cast<int>(item.history.size()) >= max_depth) continue;
        const auto samples = backend.sample_next(task, item.history, k);
        // Count per canonical key, first-seen order.
        std::vector<std::pair<ActionRecord, int>> classes;
        for (const std::string& raw : samples) {
            ActionRecord rec;
            try {
                rec = canonicalize_action(raw, finish_token);
            } catch (const ParseError&) {
                continue;
            }
            bool merged = false;
            for (auto& [rep, count] : classes)
                if (rep.canonical_key == rec.canonical_key) {
                    ++count;
                    merged = true;
                    break;
                }
            if (!merged) classes.emplace_back(std::move(rec), 1);
        }
        for (const auto& [rep, count] : classes) {
            Item next;
            next.history = item.history;
            next.history.push_back(rep);
            next.g = item.g + (1.0 - static_cast<double>(count) / static_cast<double>(k));
            if (rep.is_finish) {
                EnumeratedPath path;
                path.keys = canonical_keys(next.history);
                path.g = next.g;
                found.push_back(std::move(path));
            } else {
                queue.push_back(std::move(next));
            }
        }
    }
    return found;
}

inline std::optional<double> min_terminal_cost(const std::vector<EnumeratedPath>& paths) {
    std::optional<double> best;
    for (const EnumeratedPath& p : paths)
        if (!best || p.g < *best) best = p.g;
    return best;
}

// ---------------------------------------------------------------------------
// Trace replay: reconstruct a run from its events alone. Children announced
// by update events hang off the most recent expand event's node.
// ---------------------------------------------------------------------------

struct ReplayedRun {
    struct Node {
        std::optional<toolchain::NodeId> parent;
        std::string action_key;
        double f = 0.0;
        double g_cum = 0.0;
        double h_cost = 0.0;
    };
    std::map<toolchain::NodeId, Node> nodes;                 // includes the root (id 0)
    std::vector<toolchain::NodeId> selected;                 // select event order
    std::vector<toolchain::NodeId> expanded;                 // expand event order
    std::optional<toolchain::NodeId> terminal;               // success, if any
    std::uint64_t final_calls = 0;
    double final_timestamp = 0.0;

    std::vector<std::string> key_path(toolchain::NodeId id) const {
        std::vector<std::string> keys;
        for (std::optional<toolchain::NodeId> cur = id; cur && *cur != 0;
             cur = nodes.at(*cur).parent)
            keys.push_back(nodes.at(*cur).action_key);
        std::reverse(keys.begin(), keys.end());
        return keys;
    }
};

inline ReplayedRun replay_trace(const std::vector<toolchain::TraceEvent>& trace) {
    using toolchain::TraceKind;
    ReplayedRun run;
    run.nodes[0] = {};  // root
    std::optional<toolchain::NodeId> last_expanded;
    std::uint32_t last_step = 0;
    for (const auto& e : trace) {
        if (e.step <= last_step) throw std::runtime_error("trace steps not increasing");
        last_step = e.step;
        switch (e.kind) {
            case TraceKind::select:
                run.selected.push_back(e.node_id);
                break;
            case TraceKind::expand:
                run.expanded.push_back(e.node_id);
                last_expanded = e.node_id;
                break;
            case TraceKind::update: {
                ReplayedRun::Node n;
                if (!last_expanded) throw std::runtime_error("update before any expand");
                n.parent = *last_expanded;
                n.action_key = e.action_key;
                n.f = e.f;
                n.g_cum = e.g_cum;
                n.h_cost = e.h_cost;
                run.nodes[e.node_id] = std::move(n);
                break;
            }
            case TraceKind::terminal:
                run.terminal = e.node_id;
                break;
            case TraceKind::error:
                break;
        }
        run.final_calls = e.proposer_calls;
        run.final_timestamp = e.timestamp;
    }
    return run;
}

/// Frontier audit for best-first traces: whenever a node is selected, its f
/// must not exceed any f still waiting on the frontier.
inline void audit_frontier_order(const std::vector<toolchain::TraceEvent>& trace) {
    using toolchain::TraceKind;
    std::map<toolchain::NodeId, double> frontier{{0, 0.0}};
    for (const auto& e : trace) {
        if (e.kind == TraceKind::select) {
            const auto it = frontier.find(e.node_id);
            if (it == frontier.end()) throw std::runtime_error("selected node not on frontier");
            for (const auto& [id, f] : frontier)
                if (e.f > f + 1e-12) throw std::runtime_error("selected node was not f-minimal");
            frontier.erase(it);
        } else if (e.kind == TraceKind::update) {
            frontier[e.node_id] = e.f;
        }
    }
}

}  // namespace oracles
