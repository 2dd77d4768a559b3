#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "toolchain/action.hpp"
#include "toolchain/errors.hpp"

namespace toolchain {

using NodeId = std::uint32_t;

enum class NodeStatus { frontier, expanded, terminal, pruned };

inline const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::frontier: return "frontier";
        case NodeStatus::expanded: return "expanded";
        case NodeStatus::terminal: return "terminal";
        case NodeStatus::pruned: return "pruned";
    }
    return "?";
}

/// One explored action in the tree. The root carries the task but no action;
/// depth counts actions only, so depth(n) is the number of actions on the
/// path through n inclusive.
struct PlanNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    std::optional<ActionRecord> action;
    int depth = 0;

    // Per-step scores in [0,1]; g1/h1 are absent when long-term memory has
    // nothing to say, h2 when imagination came back empty.
    std::optional<double> g1;
    double g2 = 0.0;
    std::optional<double> h1;
    std::optional<double> h2;

    double step_cost = 0.0;
    double g_cum = 0.0;
    double h_cost = 0.0;
    double f = 0.0;
    bool scored = false;

    // True when the action declares completion or the environment marks the
    // path goal-reached. Such nodes stay on the frontier until selected.
    bool terminal_hint = false;

    NodeStatus status = NodeStatus::frontier;
    std::uint64_t insertion = 0;
};

/// Append-only arena of PlanNode plus the cost-ordered frontier.
/// Total order on the frontier: (f, depth, insertion) ascending — shallower
/// ties favor cheaper plans, insertion order makes replay deterministic.
class SearchTree {
public:
    SearchTree() {
        PlanNode root;
        root.id = 0;
        root.depth = 0;
        root.scored = true;  // g_cum = 0, h = 0, f = 0
        root.insertion = insertion_counter_++;
        nodes_.push_back(std::move(root));
        enqueue(0);
    }

    NodeId root() const { return 0; }
    std::size_t size() const { return nodes_.size(); }

    const PlanNode& node(NodeId id) const {
        check(id);
        return nodes_[id];
    }
    PlanNode& node(NodeId id) {
        check(id);
        return nodes_[id];
    }

    /// Append a child under parent. Costs stay unset until the update phase
    /// scores the node and finalize() puts it on the frontier.
    NodeId add_child(NodeId parent, ActionRecord action) {
        check(parent);
        PlanNode child;
        child.id = static_cast<NodeId>(nodes_.size());
        child.parent = parent;
        child.depth = nodes_[parent].depth + 1;
        child.action = std::move(action);
        child.insertion = insertion_counter_++;
        child.status = NodeStatus::frontier;
        nodes_.push_back(std::move(child));
        return nodes_.back().id;
    }

    /// Actions from the first step to n inclusive; the root contributes none.
    std::vector<ActionRecord> path_to_root(NodeId n) const {
        check(n);
        std::vector<ActionRecord> path(nodes_[n].depth);
        NodeId cur = n;
        for (std::size_t i = path.size(); i-- > 0;) {
            path[i] = *nodes_[cur].action;
            cur = *nodes_[cur].parent;
        }
        return path;
    }

    /// Put a scored node on the frontier ordering.
    void enqueue(NodeId id) {
        check(id);
        frontier_.insert(key_of(nodes_[id]));
    }

    bool frontier_empty() const { return frontier_.empty(); }
    std::size_t frontier_size() const { return frontier_.size(); }

    /// Pop the frontier minimum by (f, depth, insertion).
    NodeId pop_min() {
        if (frontier_.empty()) throw Error("pop_min on an empty frontier");
        NodeId id = std::get<3>(*frontier_.begin());
        frontier_.erase(frontier_.begin());
        return id;
    }

    /// Lowest-f frontier node satisfying pred, if any.
    template <class Pred>
    std::optional<NodeId> frontier_min_if(Pred pred) const {
        for (const auto& k : frontier_) {
            NodeId id = std::get<3>(k);
            if (pred(nodes_[id])) return id;
        }
        return std::nullopt;
    }

    void remove_from_frontier(NodeId id) {
        check(id);
        frontier_.erase(key_of(nodes_[id]));
    }

private:
    using Key = std::tuple<double, int, std::uint64_t, NodeId>;

    static Key key_of(const PlanNode& n) { return {n.f, n.depth, n.insertion, n.id}; }

    void check(NodeId id) const {
        if (id >= nodes_.size()) throw UnknownNode("no node with id " + std::to_string(id));
    }

    std::vector<PlanNode> nodes_;
    std::set<Key> frontier_;
    std::uint64_t insertion_counter_ = 0;
};

}  // namespace toolchain
