#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toolchain/action.hpp"
#include "toolchain/cost.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/task.hpp"

namespace toolchain {

/// Sampling configuration for action generation.
struct ProposerConfig {
    int k = 10;
    double temperature = 1.0;  // live backend only
    std::string prompt_template =
        "{tool_docs}\n\n{demonstrations}\n\nTask: {task}\nHistory:\n{history}\nNext action:";
    std::string finish_token = kDefaultFinishToken;
    int max_imagined_steps = 20;

    void validate() const {
        if (k < 1) throw DomainError("k must be >= 1");
        if (max_imagined_steps < 1) throw DomainError("max_imagined_steps must be >= 1");
        for (const char* slot : {"{tool_docs}", "{demonstrations}", "{task}", "{history}"})
            if (prompt_template.find(slot) == std::string::npos)
                throw DomainError(std::string("prompt_template missing slot ") + slot);
    }
};

/// Pluggable predicate deciding whether two sampled actions are the same
/// step. Implementations must be reflexive and symmetric, and should be
/// transitive since grouping unions pairwise checks.
class EquivalenceOracle {
public:
    virtual ~EquivalenceOracle() = default;
    virtual bool equivalent(const ActionRecord& a, const ActionRecord& b) const = 0;
};

/// Default oracle: canonical-key equality. Matches the strict-format rule
/// for tool calls; semantic (NLI-style) oracles plug in behind the same
/// interface for natural-language reasoning steps.
class CanonicalKeyOracle final : public EquivalenceOracle {
public:
    bool equivalent(const ActionRecord& a, const ActionRecord& b) const override {
        return a.canonical_key == b.canonical_key;
    }
};

inline const EquivalenceOracle& default_oracle() {
    static const CanonicalKeyOracle oracle;
    return oracle;
}

/// One equivalence class of sampled actions. The representative is the
/// first-sampled member.
struct ActionClass {
    ActionRecord representative;
    int count = 0;
};

/// k raw samples grouped into equivalence classes with frequencies.
/// Invariant: sum of counts + parse_failures == k.
struct ProposalBatch {
    std::vector<std::string> samples;
    std::vector<ActionClass> classes;
    int parse_failures = 0;
    int k = 0;

    double frequency(std::size_t class_idx) const {
        return static_cast<double>(classes[class_idx].count) / static_cast<double>(k);
    }
};

/// Action generation backend: k i.i.d. next-step samples plus one imagined
/// completion of the current history. Implementations report how many calls
/// they have served; that counter is the efficiency metric substrate.
class ProposerBackend {
public:
    virtual ~ProposerBackend() = default;

    /// Exactly k raw next-action strings for the given history.
    virtual std::vector<std::string> sample_next(const TaskSpec& task,
                                                 const std::vector<ActionRecord>& history,
                                                 int k) = 0;

    /// Raw actions continuing the history to an imagined finish; may be empty
    /// when the backend cannot imagine anything.
    virtual std::vector<std::string> imagine(const TaskSpec& task,
                                             const std::vector<ActionRecord>& history) = 0;

    virtual std::uint64_t calls() const = 0;
};

/// Group parsed samples into classes under the oracle. Each parsed sample
/// joins the first class whose representative it is equivalent to.
inline std::vector<ActionClass> group_equivalent(const std::vector<ActionRecord>& parsed,
                                                 const EquivalenceOracle& oracle) {
    std::vector<ActionClass> classes;
    for (const ActionRecord& a : parsed) {
        bool joined = false;
        for (ActionClass& c : classes) {
            if (oracle.equivalent(a, c.representative)) {
                ++c.count;
                joined = true;
                break;
            }
        }
        if (!joined) classes.push_back({a, 1});
    }
    return classes;
}

/// One expansion: sample k candidates, parse, group. Unparseable samples are
/// discarded but still divide the frequencies, so noise lowers confidence
/// instead of inflating it. Throws EmptyBatch when nothing parses.
inline ProposalBatch propose_next(ProposerBackend& backend, const TaskSpec& task,
                                  const std::vector<ActionRecord>& history,
                                  const ProposerConfig& cfg,
                                  const EquivalenceOracle& oracle = default_oracle()) {
    ProposalBatch batch;
    batch.k = cfg.k;
    batch.samples = backend.sample_next(task, history, cfg.k);
    std::vector<ActionRecord> parsed;
    parsed.reserve(batch.samples.size());
    for (const std::string& raw : batch.samples) {
        try {
            parsed.push_back(canonicalize_action(raw, cfg.finish_token));
        } catch (const ParseError&) {
            ++batch.parse_failures;
        }
    }
    batch.classes = group_equivalent(parsed, oracle);
    if (batch.classes.empty()) throw EmptyBatch("all " + std::to_string(cfg.k) + " samples failed to parse");
    return batch;
}

/// One imagined continuation of the history, parsed and truncated at the
/// first finish action or at max_imagined_steps.
inline std::vector<ActionRecord> imagine_completion(ProposerBackend& backend,
                                                    const TaskSpec& task,
                                                    const std::vector<ActionRecord>& history,
                                                    const ProposerConfig& cfg) {
    std::vector<ActionRecord> out;
    for (const std::string& raw : backend.imagine(task, history)) {
        if (static_cast<int>(out.size()) >= cfg.max_imagined_steps) break;
        try {
            out.push_back(canonicalize_action(raw, cfg.finish_token));
        } catch (const ParseError&) {
            continue;  // drop unusable imagined steps
        }
        if (out.back().is_finish) break;
    }
    return out;
}

/// Imagination score: the ratio of the current depth to the imagined total
/// plan length. A plan imagined shorter than the path already is would push
/// the ratio above 1; clamping keeps it a unit-interval score.
inline std::optional<double> imagination_score(std::size_t depth, std::size_t imagined_total,
                                               bool clamp = true) {
    if (imagined_total == 0) return std::nullopt;
    double r = static_cast<double>(depth) / static_cast<double>(imagined_total);
    if (clamp && r > 1.0) r = 1.0;
    return r;
}

}  // namespace toolchain
