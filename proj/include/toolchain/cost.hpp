#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>

#include "toolchain/errors.hpp"
#include "toolchain/tree.hpp"

namespace toolchain {

enum class Ablation { drop_g1, drop_g2, drop_h1, drop_h2, drop_g, drop_h };

inline const char* to_string(Ablation a) {
    switch (a) {
        case Ablation::drop_g1: return "g1";
        case Ablation::drop_g2: return "g2";
        case Ablation::drop_h1: return "h1";
        case Ablation::drop_h2: return "h2";
        case Ablation::drop_g: return "g";
        case Ablation::drop_h: return "h";
    }
    return "?";
}

inline Ablation ablation_from_string(const std::string& s) {
    if (s == "g1") return Ablation::drop_g1;
    if (s == "g2") return Ablation::drop_g2;
    if (s == "h1") return Ablation::drop_h1;
    if (s == "h2") return Ablation::drop_h2;
    if (s == "g") return Ablation::drop_g;
    if (s == "h") return Ablation::drop_h;
    throw DomainError("unknown ablation: " + s);
}

/// Weights, sampling width, step limit, and ablation switches for one run.
struct CostConfig {
    double alpha = 0.5;  // geometric-mean weight inside the step cost
    double beta = 0.5;   // geometric-mean weight inside the future cost
    int k = 10;          // samples per expansion
    int T = 20;          // step (selection) limit
    std::set<Ablation> ablations;
    bool clamp_h2 = true;

    bool dropped(Ablation a) const { return ablations.count(a) != 0; }

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha outside [0,1]");
        if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta outside [0,1]");
        if (k < 1) throw DomainError("k must be >= 1");
        if (T < 1) throw DomainError("T must be >= 1");
        if (dropped(Ablation::drop_g) && (dropped(Ablation::drop_g1) || dropped(Ablation::drop_g2)))
            throw DomainError("drop_g excludes drop_g1/drop_g2");
        if (dropped(Ablation::drop_h) && (dropped(Ablation::drop_h1) || dropped(Ablation::drop_h2)))
            throw DomainError("drop_h excludes drop_h1/drop_h2");
    }
};

namespace detail {

inline void check_unit(std::optional<double> v, const char* name) {
    if (v && !(*v >= 0.0 && *v <= 1.0))
        throw DomainError(std::string(name) + " outside [0,1]");
}

/// pow with the 0^0 := 1 convention, so a weight at an extreme hands the
/// decision entirely to the other factor.
inline double pow_conv(double base, double exp) {
    if (exp == 0.0) return 1.0;
    return std::pow(base, exp);
}

/// Geometric-mean complement combination shared by step and future cost.
/// Either score may be unavailable (absent or ablated); with both gone the
/// caller-supplied fallback applies.
inline double combine(std::optional<double> s1, std::optional<double> s2, double weight,
                      double fallback) {
    if (s1 && s2) return pow_conv(1.0 - *s1, weight) * pow_conv(1.0 - *s2, 1.0 - weight);
    if (s2) return 1.0 - *s2;
    if (s1) return 1.0 - *s1;
    return fallback;
}

}  // namespace detail

/// Per-step cost (1-g1)^alpha * (1-g2)^(1-alpha). A missing g1 (empty memory)
/// degrades to self-consistency alone; with both components gone every step
/// costs 1, i.e. uniform search.
inline double step_cost(std::optional<double> g1, double g2, const CostConfig& cfg) {
    detail::check_unit(g1, "g1");
    detail::check_unit(g2, "g2");
    if (cfg.dropped(Ablation::drop_g1)) g1.reset();
    std::optional<double> s2 = g2;
    if (cfg.dropped(Ablation::drop_g2)) s2.reset();
    return detail::combine(g1, s2, cfg.alpha, 1.0);
}

/// Future cost (1-h1)^beta * (1-h2)^(1-beta). h2 may itself be absent when
/// imagination produced nothing, which acts like drop_h2 for that node.
inline double future_cost(std::optional<double> h1, std::optional<double> h2,
                          const CostConfig& cfg) {
    detail::check_unit(h1, "h1");
    detail::check_unit(h2, "h2");
    if (cfg.dropped(Ablation::drop_h)) return 0.0;
    if (cfg.dropped(Ablation::drop_h1)) h1.reset();
    if (cfg.dropped(Ablation::drop_h2)) h2.reset();
    return detail::combine(h1, h2, cfg.beta, 1.0);
}

/// f = g + h with the whole-component ablations applied.
inline double total_cost(double g_cum, double h_cost, const CostConfig& cfg) {
    if (cfg.dropped(Ablation::drop_g)) g_cum = 0.0;
    if (cfg.dropped(Ablation::drop_h)) h_cost = 0.0;
    return g_cum + h_cost;
}

/// Sum of step costs from the first action down to n; the root contributes 0.
/// Recomputes from the stored scores, so it cross-checks the incremental
/// g_cum the search maintains.
inline double cumulative_cost(const SearchTree& tree, NodeId n, const CostConfig& cfg) {
    double sum = 0.0;
    NodeId cur = n;
    while (true) {
        const PlanNode& node = tree.node(cur);
        if (!node.parent) break;  // root
        if (!node.scored) throw UnscoredNode("node " + std::to_string(cur) + " has no scores");
        sum += step_cost(node.g1, node.g2, cfg);
        cur = *node.parent;
    }
    return sum;
}

}  // namespace toolchain
