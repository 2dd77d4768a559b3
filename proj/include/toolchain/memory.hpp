#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolchain/action.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/lcs.hpp"

namespace toolchain {

enum class MemoryOrigin { seed, learned };

/// One remembered successful plan.
struct MemoryEntry {
    std::string task_hint;
    std::vector<ActionRecord> plan;
    std::vector<std::string> keys;  // cached canonical keys of plan
    MemoryOrigin origin = MemoryOrigin::seed;

    std::size_t length() const { return plan.size(); }
};

/// Long-term memory of successful plans. Grows during evaluation; entries
/// with an identical key sequence are deduplicated on insert.
class MemoryStore {
public:
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<MemoryEntry>& entries() const { return entries_; }

    /// Insert a plan unless an identical key sequence is already present.
    /// Returns true when the store grew.
    bool insert(std::vector<ActionRecord> plan, std::string task_hint, MemoryOrigin origin) {
        if (plan.empty()) return false;
        MemoryEntry entry;
        entry.task_hint = std::move(task_hint);
        entry.keys = canonical_keys(plan);
        entry.plan = std::move(plan);
        entry.origin = origin;
        for (const MemoryEntry& e : entries_)
            if (e.keys == entry.keys) return false;
        entries_.push_back(std::move(entry));
        return true;
    }

private:
    std::vector<MemoryEntry> entries_;
};

/// LCS length normalized by the shorter sequence: the overlap between a plan
/// prefix and one memory plan. The prefix must be non-empty.
inline double lcs_score(std::span<const std::string> prefix_keys, const MemoryEntry& entry) {
    if (prefix_keys.empty()) throw DegenerateInput("lcs_score on empty plan prefix");
    const std::size_t common = lcs_length(prefix_keys, std::span<const std::string>(entry.keys));
    return static_cast<double>(common) /
           static_cast<double>(std::min(prefix_keys.size(), entry.length()));
}

/// Highest LCS score over the store; absent when the store is empty so the
/// cost stack can fall back to self-consistency alone.
inline std::optional<double> cumulative_heuristic_g1(std::span<const std::string> prefix_keys,
                                                     const MemoryStore& store) {
    if (store.empty()) return std::nullopt;
    double best = 0.0;
    for (const MemoryEntry& e : store.entries())
        best = std::max(best, lcs_score(prefix_keys, e));
    return best;
}

/// Mean of pos(a, m_j)/T_j over the entries containing a (first occurrence,
/// 1-indexed). Absent when no entry contains the action.
inline std::optional<double> relative_position_score(const ActionRecord& a,
                                                     const MemoryStore& store) {
    double sum = 0.0;
    std::size_t hits = 0;
    for (const MemoryEntry& e : store.entries()) {
        auto it = std::find(e.keys.begin(), e.keys.end(), a.canonical_key);
        if (it == e.keys.end()) continue;
        const auto pos = static_cast<double>(it - e.keys.begin() + 1);
        sum += pos / static_cast<double>(e.length());
        ++hits;
    }
    if (hits == 0) return std::nullopt;
    return sum / static_cast<double>(hits);
}

/// Positional score of the lexically closest stored action, by character-LCS
/// ratio on canonical keys. Ties break toward the earlier entry, then the
/// earlier position within the plan.
inline std::optional<double> future_heuristic_h1(const ActionRecord& a, const MemoryStore& store) {
    if (store.empty()) return std::nullopt;
    const ActionRecord* closest = nullptr;
    double best = -1.0;
    for (const MemoryEntry& e : store.entries()) {
        for (std::size_t i = 0; i < e.plan.size(); ++i) {
            const double r = char_lcs_ratio(a.canonical_key, e.keys[i]);
            if (r > best) {
                best = r;
                closest = &e.plan[i];
            }
        }
    }
    if (!closest) return std::nullopt;
    return relative_position_score(*closest, store);
}

/// Append a verified-successful plan to the store (dedup on key sequence).
inline void record_success(MemoryStore& store, std::vector<ActionRecord> plan,
                           std::string task_hint) {
    store.insert(std::move(plan), std::move(task_hint), MemoryOrigin::learned);
}

// ---------------------------------------------------------------------------
// Persistence: line-delimited JSON, one entry per line,
// {"task_hint": ..., "plan": [raw_text...], "origin": "seed"|"learned"}.
// ---------------------------------------------------------------------------

inline void save_memory(const MemoryStore& store, std::ostream& out) {
    for (const MemoryEntry& e : store.entries()) {
        nlohmann::ordered_json line;
        line["task_hint"] = e.task_hint;
        auto& plan = line["plan"] = nlohmann::ordered_json::array();
        for (const ActionRecord& a : e.plan) plan.push_back(a.raw_text);
        line["origin"] = e.origin == MemoryOrigin::seed ? "seed" : "learned";
        out << line.dump() << "\n";
    }
}

inline void save_memory_file(const MemoryStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open memory file for writing: " + path);
    save_memory(store, out);
}

inline void load_memory(MemoryStore& store, std::istream& in,
                        std::string_view finish_token = kDefaultFinishToken) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError("memory line " + std::to_string(lineno) + ": " + ex.what());
        }
        std::vector<ActionRecord> plan;
        for (const auto& raw : j.at("plan"))
            plan.push_back(canonicalize_action(raw.get<std::string>(), finish_token));
        if (plan.empty())
            throw FormatError("memory line " + std::to_string(lineno) + ": empty plan");
        for (std::size_t i = 0; i + 1 < plan.size(); ++i)
            if (plan[i].is_finish)
                throw FormatError("memory line " + std::to_string(lineno) +
                                  ": finish action before the last position");
        const auto origin = j.value("origin", "seed") == "learned" ? MemoryOrigin::learned
                                                                   : MemoryOrigin::seed;
        store.insert(std::move(plan), j.value("task_hint", ""), origin);
    }
}

inline void load_memory_file(MemoryStore& store, const std::string& path,
                             std::string_view finish_token = kDefaultFinishToken) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open memory file: " + path);
    load_memory(store, in, finish_token);
}

}  // namespace toolchain
