#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolchain/action.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/proposer.hpp"
#include "toolchain/rng.hpp"
#include "toolchain/task.hpp"

namespace toolchain {

/// One scripted candidate with its sampling probability.
struct ScriptCandidate {
    std::string action;  // raw text; may be deliberately unparseable noise
    double prob = 0.0;
};

/// One script rule: applies to any history whose canonical keys start with
/// history_key_prefix; the longest matching prefix wins.
struct ScriptLine {
    std::vector<std::string> prefix_keys;
    std::vector<ScriptCandidate> candidates;
    std::vector<std::string> imagined_completion;
};

/// A task's proposer script.
struct Script {
    std::vector<ScriptLine> lines;

    /// Longest-prefix match; earlier line wins ties. nullptr when nothing
    /// matches (not even an empty prefix).
    const ScriptLine* match(const std::vector<std::string>& history_keys) const {
        const ScriptLine* best = nullptr;
        for (const ScriptLine& line : lines) {
            if (line.prefix_keys.size() > history_keys.size()) continue;
            if (!std::equal(line.prefix_keys.begin(), line.prefix_keys.end(),
                            history_keys.begin()))
                continue;
            if (!best || line.prefix_keys.size() > best->prefix_keys.size()) best = &line;
        }
        return best;
    }
};

inline ScriptLine parse_script_line(const nlohmann::json& j,
                                    std::string_view finish_token = kDefaultFinishToken) {
    ScriptLine line;
    if (j.contains("history_key_prefix"))
        for (const auto& raw : j.at("history_key_prefix"))
            line.prefix_keys.push_back(
                canonicalize_action(raw.get<std::string>(), finish_token).canonical_key);
    if (j.contains("candidates")) {
        for (const auto& c : j.at("candidates")) {
            ScriptCandidate cand;
            cand.action = c.at("action").get<std::string>();
            cand.prob = c.at("prob").get<double>();
            if (cand.prob < 0.0) throw FormatError("negative candidate prob");
            line.candidates.push_back(std::move(cand));
        }
    }
    if (j.contains("imagined_completion"))
        for (const auto& raw : j.at("imagined_completion"))
            line.imagined_completion.push_back(raw.get<std::string>());
    return line;
}

inline Script parse_script(const nlohmann::json& array,
                           std::string_view finish_token = kDefaultFinishToken) {
    Script script;
    for (const auto& j : array) script.lines.push_back(parse_script_line(j, finish_token));
    return script;
}

/// Load a standalone script file: line-delimited JSON, one rule per line.
inline Script load_script_file(const std::string& path,
                               std::string_view finish_token = kDefaultFinishToken) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open script file: " + path);
    Script script;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            script.lines.push_back(parse_script_line(nlohmann::json::parse(line), finish_token));
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError("script line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return script;
}

/// Deterministic scripted proposer. Every batch is a pure function of
/// (task seed, history canonical keys, per-history draw counter), so any
/// traversal order over distinct histories sees identical batches, while
/// repeated draws at one history (MCTS rollouts) get fresh samples.
class ScriptedBackend final : public ProposerBackend {
public:
    explicit ScriptedBackend(Script script) : script_(std::move(script)) {}

    std::vector<std::string> sample_next(const TaskSpec& task,
                                         const std::vector<ActionRecord>& history,
                                         int k) override {
        ++calls_;
        const std::vector<std::string> keys = canonical_keys(history);
        const std::string hist_id = joined(keys);
        const std::uint32_t draw = draw_counts_[hist_id]++;
        const ScriptLine* line = script_.match(keys);

        std::vector<std::string> samples(static_cast<std::size_t>(k));
        if (!line || line->candidates.empty()) return samples;  // k empties -> parse failures

        double total = 0.0;
        for (const ScriptCandidate& c : line->candidates) total += c.prob;
        if (total <= 0.0) return samples;

        Rng rng(sample_seed(task.seed, hist_id, draw));
        for (std::string& s : samples) {
            const double u = rng.uniform01() * total;
            double cum = 0.0;
            s = line->candidates.back().action;
            for (const ScriptCandidate& c : line->candidates) {
                cum += c.prob;
                if (u < cum) {
                    s = c.action;
                    break;
                }
            }
        }
        return samples;
    }

    std::vector<std::string> imagine(const TaskSpec& task,
                                     const std::vector<ActionRecord>& history) override {
        (void)task;
        ++calls_;
        const ScriptLine* line = script_.match(canonical_keys(history));
        if (!line) return {};
        return line->imagined_completion;
    }

    std::uint64_t calls() const override { return calls_; }

    /// Seed derivation, exposed so tests can replay the generator.
    static std::uint64_t sample_seed(std::uint64_t task_seed, const std::string& hist_id,
                                     std::uint32_t draw) {
        return mix64(mix64(task_seed ^ fnv1a64(hist_id)) + draw);
    }

    static std::string joined(const std::vector<std::string>& keys) {
        std::string id;
        for (const std::string& k : keys) {
            id += k;
            id.push_back('\x1f');
        }
        return id;
    }

private:
    Script script_;
    std::uint64_t calls_ = 0;
    std::map<std::string, std::uint32_t> draw_counts_;
};

}  // namespace toolchain
