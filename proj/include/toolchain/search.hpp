#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toolchain/cost.hpp"
#include "toolchain/env.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/memory.hpp"
#include "toolchain/proposer.hpp"
#include "toolchain/task.hpp"
#include "toolchain/trace.hpp"
#include "toolchain/tree.hpp"

namespace toolchain {

enum class SearchOutcome { success, budget_exhausted, dead_end };

inline const char* to_string(SearchOutcome o) {
    switch (o) {
        case SearchOutcome::success: return "success";
        case SearchOutcome::budget_exhausted: return "budget_exhausted";
        case SearchOutcome::dead_end: return "dead_end";
    }
    return "?";
}

/// UCT baseline knobs.
struct MctsConfig {
    double exploration_c = 1.4142135623730951;
    int rollouts_per_iteration = 1;
    int rollout_depth_cap = 8;
    int iterations = 30;

    void validate() const {
        if (exploration_c < 0.0) throw DomainError("exploration_c must be >= 0");
        if (rollouts_per_iteration < 1) throw DomainError("rollouts_per_iteration must be >= 1");
        if (rollout_depth_cap < 1) throw DomainError("rollout_depth_cap must be >= 1");
        if (iterations < 1) throw DomainError("iterations must be >= 1");
    }
};

/// Everything one search run needs besides task/env/backend/memory.
/// The run clock is virtual by default: it advances a fixed latency per
/// backend call, which keeps outputs byte-reproducible while still ranking
/// algorithms by what dominates real runtime. Pass real_time for wall time.
struct SearchSettings {
    CostConfig cost;
    ProposerConfig proposer;
    std::string run_id = "run";
    double per_call_seconds = 1e-3;
    bool real_time = false;
    const EquivalenceOracle* oracle = nullptr;  // null -> canonical-key oracle

    void validate() const {
        cost.validate();
        proposer.validate();
    }

    /// k lives in both configs; the cost config is authoritative.
    void sync() { proposer.k = cost.k; }
};

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::dead_end;
    std::vector<ActionRecord> best_path;
    double best_f = std::numeric_limits<double>::infinity();
    int nodes_expanded = 0;
    std::uint64_t proposer_calls = 0;
    double wall_time = 0.0;  // seconds on the run clock
    std::vector<TraceEvent> trace;
};

/// Carries the partial trace and metrics when a backend failure aborts a run.
class SearchAborted : public Error {
public:
    SearchAborted(const std::string& why, std::vector<TraceEvent> trace, int nodes_expanded,
                  std::uint64_t calls, double wall_time)
        : Error(why),
          trace_(std::move(trace)),
          nodes_expanded_(nodes_expanded),
          proposer_calls_(calls),
          wall_time_(wall_time) {}

    const std::vector<TraceEvent>& trace() const { return trace_; }
    int nodes_expanded() const { return nodes_expanded_; }
    std::uint64_t proposer_calls() const { return proposer_calls_; }
    double wall_time() const { return wall_time_; }

private:
    std::vector<TraceEvent> trace_;
    int nodes_expanded_;
    std::uint64_t proposer_calls_;
    double wall_time_;
};

namespace detail {

/// State and plumbing shared by all five algorithms: the tree, the metrics,
/// the trace, and the child scoring pipeline.
class SearchRun {
public:
    SearchRun(const TaskSpec& task, const Environment& env, ProposerBackend& backend,
              const MemoryStore* memory, const SearchSettings& settings)
        : task(task),
          env(env),
          backend(backend),
          memory(memory && !memory->empty() ? memory : nullptr),
          st(settings),
          calls0_(backend.calls()),
          t0_(std::chrono::steady_clock::now()) {
        st.sync();
        st.validate();
    }

    const TaskSpec& task;
    const Environment& env;
    ProposerBackend& backend;
    const MemoryStore* memory;
    SearchSettings st;

    SearchTree tree;
    std::vector<TraceEvent> trace;
    int nodes_expanded = 0;

    std::uint64_t calls() const { return backend.calls() - calls0_; }

    double now() const {
        if (st.real_time) {
            const auto dt = std::chrono::steady_clock::now() - t0_;
            return std::chrono::duration<double>(dt).count();
        }
        return static_cast<double>(calls()) * st.per_call_seconds;
    }

    const EquivalenceOracle& oracle() const {
        return st.oracle ? *st.oracle : default_oracle();
    }

    void emit(TraceKind kind, NodeId id) {
        const PlanNode& n = tree.node(id);
        TraceEvent e;
        e.run_id = st.run_id;
        e.step = ++step_;
        e.kind = kind;
        e.node_id = id;
        e.f = n.f;
        e.g_cum = n.g_cum;
        e.h_cost = n.h_cost;
        e.proposer_calls = calls();
        e.timestamp = now();
        if (kind == TraceKind::update && n.action) e.action_key = n.action->canonical_key;
        trace.push_back(std::move(e));
    }

    ProposalBatch propose(NodeId n) {
        return propose_next(backend, task, tree.path_to_root(n), st.proposer, oracle());
    }

    /// Add one child per class and score it. with_future_cost turns on the
    /// h side: one imagination call per new child, h forced to 0 on nodes
    /// that already look terminal.
    NodeId add_scored_child(NodeId parent, const ActionClass& cls, bool with_future_cost) {
        const NodeId id = tree.add_child(parent, cls.representative);
        PlanNode& child = tree.node(id);
        const std::vector<ActionRecord> path = tree.path_to_root(id);
        const std::vector<std::string> keys = canonical_keys(path);

        child.g1 = memory ? cumulative_heuristic_g1(keys, *memory) : std::nullopt;
        child.g2 = static_cast<double>(cls.count) / static_cast<double>(st.cost.k);
        child.step_cost = step_cost(child.g1, child.g2, st.cost);
        child.g_cum = tree.node(parent).g_cum + child.step_cost;
        child.terminal_hint = path.back().is_finish || env.is_terminal(path);

        if (with_future_cost) {
            child.h1 = memory ? future_heuristic_h1(*child.action, *memory) : std::nullopt;
            const auto imagined = imagine_completion(backend, task, path, st.proposer);
            child.h2 = imagination_score(static_cast<std::size_t>(child.depth),
                                         static_cast<std::size_t>(child.depth) + imagined.size(),
                                         st.cost.clamp_h2);
            if (imagined.empty()) child.h2.reset();
            child.h_cost =
                child.terminal_hint ? 0.0 : future_cost(child.h1, child.h2, st.cost);
        } else {
            child.h_cost = 0.0;
        }
        child.f = total_cost(child.g_cum, child.h_cost, st.cost);
        child.scored = true;
        tree.enqueue(id);
        emit(TraceKind::update, id);
        return id;
    }

    SearchResult finish(SearchOutcome outcome, std::optional<NodeId> best) {
        SearchResult r;
        r.outcome = outcome;
        if (best) {
            r.best_path = tree.path_to_root(*best);
            r.best_f = tree.node(*best).f;
        }
        r.nodes_expanded = nodes_expanded;
        r.proposer_calls = calls();
        r.wall_time = now();
        r.trace = std::move(trace);
        return r;
    }

    [[noreturn]] void abort_with(const Error& cause) {
        throw SearchAborted(cause.what(), std::move(trace), nodes_expanded, calls(), now());
    }

private:
    std::uint64_t calls0_;
    std::chrono::steady_clock::time_point t0_;
    std::uint32_t step_ = 0;
};

template <class Body>
SearchResult guarded(SearchRun& run, Body body) {
    try {
        return body();
    } catch (const BackendUnavailable& e) {
        run.abort_with(e);
    } catch (const HttpStatusError& e) {
        run.abort_with(e);
    } catch (const BudgetExceeded& e) {
        run.abort_with(e);
    }
}

/// Modal class: highest count, ties to the first-sampled class.
inline std::size_t modal_class(const ProposalBatch& batch) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < batch.classes.size(); ++i)
        if (batch.classes[i].count > batch.classes[best].count) best = i;
    return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Best-first search with f = g + h. Select the cheapest frontier node, stop
// when a terminal node is selected and the environment confirms it, expand
// one proposal batch otherwise, then score every new child.
// ---------------------------------------------------------------------------
inline SearchResult toolchain_star(const TaskSpec& task, const Environment& env,
                                   ProposerBackend& backend, const MemoryStore* memory,
                                   const SearchSettings& settings) {
    detail::SearchRun run(task, env, backend, memory, settings);
    return detail::guarded(run, [&]() -> SearchResult {
        for (int t = 1; t <= run.st.cost.T; ++t) {
            if (run.tree.frontier_empty())
                return run.finish(SearchOutcome::dead_end, std::nullopt);
            const NodeId n = run.tree.pop_min();
            run.emit(TraceKind::select, n);

            if (run.tree.node(n).terminal_hint) {
                const auto verdict = run.env.verify(run.tree.path_to_root(n));
                if (verdict.success) {
                    run.tree.node(n).status = NodeStatus::terminal;
                    run.emit(TraceKind::terminal, n);
                    return run.finish(SearchOutcome::success, n);
                }
                run.tree.node(n).status = NodeStatus::pruned;
                run.emit(TraceKind::error, n);
                continue;
            }

            run.tree.node(n).status = NodeStatus::expanded;
            ++run.nodes_expanded;
            run.emit(TraceKind::expand, n);
            ProposalBatch batch;
            try {
                batch = run.propose(n);
            } catch (const EmptyBatch&) {
                continue;  // childless expansion; the frontier may drain to a dead end
            }
            for (const ActionClass& cls : batch.classes)
                run.add_scored_child(n, cls, /*with_future_cost=*/true);
        }
        // Budget exhausted: prefer the cheapest discovered terminal, then the
        // cheapest frontier node.
        const auto terminal =
            run.tree.frontier_min_if([](const PlanNode& n) { return n.terminal_hint; });
        const auto best =
            terminal ? terminal : run.tree.frontier_min_if([](const PlanNode&) { return true; });
        if (!best) return run.finish(SearchOutcome::dead_end, std::nullopt);
        return run.finish(SearchOutcome::budget_exhausted, best);
    });
}

// ---------------------------------------------------------------------------
// Level-synchronous beam baseline: keep the beam_width lowest-g nodes per
// level. No future cost, no imagination calls.
// ---------------------------------------------------------------------------
inline SearchResult beam_bfs(const TaskSpec& task, const Environment& env,
                             ProposerBackend& backend, const SearchSettings& settings,
                             int beam_width) {
    if (beam_width < 1) throw DomainError("beam_width must be >= 1");
    detail::SearchRun run(task, env, backend, nullptr, settings);
    return detail::guarded(run, [&]() -> SearchResult {
        std::vector<NodeId> beam{run.tree.root()};
        while (!beam.empty()) {
            std::vector<NodeId> children;
            for (const NodeId n : beam) {
                if (run.nodes_expanded >= run.st.cost.T) {
                    const auto terminal = run.tree.frontier_min_if(
                        [](const PlanNode& c) { return c.terminal_hint; });
                    const auto best = terminal ? terminal : run.tree.frontier_min_if(
                                                                [](const PlanNode&) { return true; });
                    return run.finish(SearchOutcome::budget_exhausted, best);
                }
                run.emit(TraceKind::select, n);
                run.tree.remove_from_frontier(n);
                run.tree.node(n).status = NodeStatus::expanded;
                ++run.nodes_expanded;
                run.emit(TraceKind::expand, n);
                ProposalBatch batch;
                try {
                    batch = run.propose(n);
                } catch (const EmptyBatch&) {
                    continue;
                }
                for (const ActionClass& cls : batch.classes)
                    children.push_back(run.add_scored_child(n, cls, /*with_future_cost=*/false));
            }
            if (children.empty()) return run.finish(SearchOutcome::dead_end, std::nullopt);
            std::sort(children.begin(), children.end(), [&](NodeId a, NodeId b) {
                const PlanNode& na = run.tree.node(a);
                const PlanNode& nb = run.tree.node(b);
                if (na.g_cum != nb.g_cum) return na.g_cum < nb.g_cum;
                return na.insertion < nb.insertion;
            });
            std::vector<NodeId> next;
            for (const NodeId c : children) {
                PlanNode& node = run.tree.node(c);
                if (node.terminal_hint) {
                    run.tree.remove_from_frontier(c);
                    const auto verdict = run.env.verify(run.tree.path_to_root(c));
                    if (verdict.success) {
                        node.status = NodeStatus::terminal;
                        run.emit(TraceKind::terminal, c);
                        return run.finish(SearchOutcome::success, c);
                    }
                    node.status = NodeStatus::pruned;
                    run.emit(TraceKind::error, c);
                } else if (static_cast<int>(next.size()) < beam_width) {
                    next.push_back(c);  // stays on the frontier until expanded
                } else {
                    node.status = NodeStatus::pruned;
                    run.tree.remove_from_frontier(c);
                }
            }
            beam = std::move(next);
        }
        return run.finish(SearchOutcome::dead_end, std::nullopt);
    });
}

// ---------------------------------------------------------------------------
// Depth-first descent along the cheapest child, backtracking on pruned
// branches (step cost above the threshold) and dead-ended expansions.
// ---------------------------------------------------------------------------
inline SearchResult dfs_backtrack(const TaskSpec& task, const Environment& env,
                                  ProposerBackend& backend, const SearchSettings& settings,
                                  double prune_threshold) {
    detail::SearchRun run(task, env, backend, nullptr, settings);
    return detail::guarded(run, [&]() -> SearchResult {
        struct Frame {
            NodeId node;
            std::vector<NodeId> children;  // sorted by (step_cost, insertion)
            std::size_t next = 0;
        };

        const auto expand = [&](NodeId n) -> std::optional<Frame> {
            run.tree.remove_from_frontier(n);
            run.tree.node(n).status = NodeStatus::expanded;
            ++run.nodes_expanded;
            run.emit(TraceKind::expand, n);
            ProposalBatch batch;
            try {
                batch = run.propose(n);
            } catch (const EmptyBatch&) {
                return std::nullopt;
            }
            Frame frame;
            frame.node = n;
            for (const ActionClass& cls : batch.classes)
                frame.children.push_back(run.add_scored_child(n, cls, /*with_future_cost=*/false));
            std::sort(frame.children.begin(), frame.children.end(), [&](NodeId a, NodeId b) {
                const PlanNode& na = run.tree.node(a);
                const PlanNode& nb = run.tree.node(b);
                if (na.step_cost != nb.step_cost) return na.step_cost < nb.step_cost;
                return na.insertion < nb.insertion;
            });
            return frame;
        };

        run.emit(TraceKind::select, run.tree.root());
        auto root_frame = expand(run.tree.root());
        if (!root_frame) return run.finish(SearchOutcome::dead_end, std::nullopt);
        std::vector<Frame> stack{std::move(*root_frame)};

        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (frame.next >= frame.children.size()) {
                stack.pop_back();  // backtrack
                continue;
            }
            const NodeId child = frame.children[frame.next++];
            PlanNode& node = run.tree.node(child);
            if (node.step_cost > prune_threshold) {
                node.status = NodeStatus::pruned;
                run.tree.remove_from_frontier(child);
                continue;
            }
            run.emit(TraceKind::select, child);
            if (node.terminal_hint) {
                run.tree.remove_from_frontier(child);
                const auto verdict = run.env.verify(run.tree.path_to_root(child));
                if (verdict.success) {
                    node.status = NodeStatus::terminal;
                    run.emit(TraceKind::terminal, child);
                    return run.finish(SearchOutcome::success, child);
                }
                node.status = NodeStatus::pruned;
                run.emit(TraceKind::error, child);
                continue;
            }
            if (run.nodes_expanded >= run.st.cost.T)
                return run.finish(SearchOutcome::budget_exhausted, child);
            auto next_frame = expand(child);
            if (next_frame) stack.push_back(std::move(*next_frame));
        }
        return run.finish(SearchOutcome::dead_end, std::nullopt);
    });
}

// ---------------------------------------------------------------------------
// UCT baseline. Each iteration descends to a leaf, expands one batch, then
// simulates to a terminal with one proposer call per rollout step; that
// rollout bill is the efficiency contrast with the one-step expansion above.
// ---------------------------------------------------------------------------
inline SearchResult mcts_uct(const TaskSpec& task, const Environment& env,
                             ProposerBackend& backend, const MemoryStore* memory,
                             const SearchSettings& settings, const MctsConfig& mcts) {
    mcts.validate();
    detail::SearchRun run(task, env, backend, memory, settings);
    return detail::guarded(run, [&]() -> SearchResult {
        struct Stats {
            int visits = 0;
            double value = 0.0;
        };
        std::map<NodeId, Stats> stats;
        std::map<NodeId, std::vector<NodeId>> kids;

        const auto uct_pick = [&](NodeId parent) -> NodeId {
            const auto& children = kids.at(parent);
            const double parent_visits = std::max(1, stats[parent].visits);
            NodeId best = children.front();
            double best_value = -std::numeric_limits<double>::infinity();
            for (const NodeId c : children) {
                const Stats& s = stats[c];
                // Unvisited nodes get an exploration bonus scaled by c, so
                // exploration_c = 0 is pure exploitation of observed means.
                const double mean = s.visits > 0 ? s.value / s.visits : 0.0;
                const double explore =
                    s.visits > 0 ? std::sqrt(std::log(parent_visits) / s.visits) : 1e6;
                const double v = mean + mcts.exploration_c * explore;
                if (v > best_value) {
                    best_value = v;
                    best = c;
                }
            }
            return best;
        };

        const auto rollout = [&](NodeId from) -> double {
            std::vector<ActionRecord> sim_path = run.tree.path_to_root(from);
            double sim_cost = run.tree.node(from).g_cum;
            bool reached_terminal =
                !sim_path.empty() && (sim_path.back().is_finish || env.is_terminal(sim_path));
            while (!reached_terminal &&
                   static_cast<int>(sim_path.size()) < mcts.rollout_depth_cap) {
                ProposalBatch batch;
                try {
                    batch = propose_next(backend, task, sim_path, run.st.proposer, run.oracle());
                } catch (const EmptyBatch&) {
                    break;  // stuck mid-rollout
                }
                const ActionClass& cls = batch.classes[detail::modal_class(batch)];
                sim_path.push_back(cls.representative);
                std::optional<double> g1;
                if (run.memory)
                    g1 = cumulative_heuristic_g1(canonical_keys(sim_path), *run.memory);
                sim_cost +=
                    step_cost(g1, static_cast<double>(cls.count) / run.st.cost.k, run.st.cost);
                reached_terminal = sim_path.back().is_finish || env.is_terminal(sim_path);
            }
            if (reached_terminal && env.verify(sim_path).success) return 1.0;
            if (sim_path.empty()) return 0.0;
            return 1.0 - sim_cost / static_cast<double>(sim_path.size());
        };

        const auto backprop = [&](NodeId from, double reward) {
            std::optional<NodeId> cur = from;
            while (cur) {
                Stats& s = stats[*cur];
                ++s.visits;
                s.value += reward;
                cur = run.tree.node(*cur).parent;
            }
        };

        run.tree.remove_from_frontier(run.tree.root());
        for (int it = 0; it < mcts.iterations; ++it) {
            // Selection: descend by UCT to a leaf.
            NodeId leaf = run.tree.root();
            while (kids.count(leaf) && !kids[leaf].empty()) leaf = uct_pick(leaf);
            run.emit(TraceKind::select, leaf);

            NodeId sim_start = leaf;
            const bool leaf_terminal = run.tree.node(leaf).terminal_hint;
            if (!leaf_terminal && run.nodes_expanded < run.st.cost.T) {
                run.tree.node(leaf).status = NodeStatus::expanded;
                ++run.nodes_expanded;
                run.emit(TraceKind::expand, leaf);
                ProposalBatch batch;
                bool expanded = false;
                try {
                    batch = run.propose(leaf);
                    expanded = true;
                } catch (const EmptyBatch&) {
                }
                if (expanded) {
                    auto& children = kids[leaf];
                    for (const ActionClass& cls : batch.classes) {
                        const NodeId c =
                            run.add_scored_child(leaf, cls, /*with_future_cost=*/false);
                        run.tree.remove_from_frontier(c);
                        children.push_back(c);
                    }
                    if (!children.empty()) {
                        // Most promising child: the modal (cheapest-step) class.
                        sim_start = *std::min_element(
                            children.begin(), children.end(), [&](NodeId a, NodeId b) {
                                const PlanNode& na = run.tree.node(a);
                                const PlanNode& nb = run.tree.node(b);
                                if (na.step_cost != nb.step_cost)
                                    return na.step_cost < nb.step_cost;
                                return na.insertion < nb.insertion;
                            });
                    }
                }
            }

            for (int r = 0; r < mcts.rollouts_per_iteration; ++r) {
                double reward;
                if (run.tree.node(sim_start).terminal_hint)
                    reward = env.verify(run.tree.path_to_root(sim_start)).success ? 1.0 : 0.0;
                else
                    reward = rollout(sim_start);
                backprop(sim_start, reward);
            }
        }

        // Best path by visit count.
        NodeId best = run.tree.root();
        while (kids.count(best) && !kids[best].empty()) {
            const auto& children = kids[best];
            best = *std::max_element(children.begin(), children.end(), [&](NodeId a, NodeId b) {
                if (stats[a].visits != stats[b].visits) return stats[a].visits < stats[b].visits;
                return run.tree.node(a).insertion > run.tree.node(b).insertion;
            });
        }
        if (best == run.tree.root()) return run.finish(SearchOutcome::dead_end, std::nullopt);
        const auto verdict = env.verify(run.tree.path_to_root(best));
        if (verdict.success) {
            run.tree.node(best).status = NodeStatus::terminal;
            run.emit(TraceKind::terminal, best);
            return run.finish(SearchOutcome::success, best);
        }
        return run.finish(SearchOutcome::budget_exhausted, best);
    });
}

// ---------------------------------------------------------------------------
// Greedy closed-loop baseline: commit to the highest-frequency class at every
// step, never backtrack.
// ---------------------------------------------------------------------------
inline SearchResult greedy_closed_loop(const TaskSpec& task, const Environment& env,
                                       ProposerBackend& backend,
                                       const SearchSettings& settings) {
    detail::SearchRun run(task, env, backend, nullptr, settings);
    return detail::guarded(run, [&]() -> SearchResult {
        NodeId cur = run.tree.root();
        run.tree.remove_from_frontier(cur);
        for (int t = 1; t <= run.st.cost.T; ++t) {
            run.emit(TraceKind::select, cur);
            run.tree.node(cur).status = NodeStatus::expanded;
            ++run.nodes_expanded;
            run.emit(TraceKind::expand, cur);
            ProposalBatch batch;
            try {
                batch = run.propose(cur);
            } catch (const EmptyBatch&) {
                return run.finish(SearchOutcome::dead_end,
                                  cur == run.tree.root() ? std::nullopt : std::optional(cur));
            }
            const ActionClass& cls = batch.classes[detail::modal_class(batch)];
            const NodeId child = run.add_scored_child(cur, cls, /*with_future_cost=*/false);
            run.tree.remove_from_frontier(child);
            PlanNode& node = run.tree.node(child);
            if (node.terminal_hint) {
                const auto verdict = env.verify(run.tree.path_to_root(child));
                if (verdict.success) {
                    node.status = NodeStatus::terminal;
                    run.emit(TraceKind::terminal, child);
                    return run.finish(SearchOutcome::success, child);
                }
                node.status = NodeStatus::pruned;
                run.emit(TraceKind::error, child);
                return run.finish(SearchOutcome::dead_end, child);
            }
            cur = child;
        }
        return run.finish(SearchOutcome::budget_exhausted,
                          cur == run.tree.root() ? std::nullopt : std::optional(cur));
    });
}

}  // namespace toolchain
