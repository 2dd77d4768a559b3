#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toolchain/action.hpp"
#include "toolchain/errors.hpp"

namespace toolchain {

/// Outcome of judging a completed path. Failures are values, not errors.
struct VerifyResult {
    bool success = false;
    std::string reason;  // empty on success

    static VerifyResult ok() { return {true, ""}; }
    static VerifyResult fail(std::string why) { return {false, std::move(why)}; }
};

/// A deterministic task environment: judges completed paths and answers
/// terminal detection. One instance is bound per task when a suite loads.
/// Environments give no step-level feedback to the search.
class Environment {
public:
    virtual ~Environment() = default;

    /// True whenever the last action declares completion; concrete
    /// environments may additionally mark goal-reached paths terminal.
    virtual bool is_terminal(const std::vector<ActionRecord>& path) const {
        return !path.empty() && path.back().is_finish;
    }

    /// Pure function of (path, task): same path, same verdict.
    virtual VerifyResult verify(const std::vector<ActionRecord>& path) const = 0;
};

// ---------------------------------------------------------------------------
// Toy tool environment: an API registry with dependency rules and a goal
// state, replayed call by call.
// ---------------------------------------------------------------------------

/// Registry entry: parameter names plus the state keys a call writes.
/// A write value of "$N" takes the N-th argument value (1-indexed); anything
/// else is a literal.
struct ToolDef {
    std::vector<std::string> params;
    std::vector<std::pair<std::string, std::string>> writes;
};

class ToyToolEnv final : public Environment {
public:
    ToyToolEnv(std::map<std::string, ToolDef> registry,
               std::vector<std::pair<std::string, std::string>> dependency_rules,
               std::map<std::string, std::string> goal_state)
        : registry_(std::move(registry)),
          rules_(std::move(dependency_rules)),
          goal_(std::move(goal_state)) {
        validate();
    }

    bool is_terminal(const std::vector<ActionRecord>& path) const override {
        if (Environment::is_terminal(path)) return true;
        return verify(path).success;  // goal reached without a declaration
    }

    VerifyResult verify(const std::vector<ActionRecord>& path) const override {
        if (path.empty()) return VerifyResult::fail("empty_path");
        std::map<std::string, std::string> state;
        std::set<std::string> called;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const ActionRecord& a = path[i];
            if (a.is_finish) {
                if (i + 1 != path.size()) return VerifyResult::fail("finish_not_last");
                break;  // trailing declaration carries no effects
            }
            auto it = registry_.find(a.tool_name);
            if (it == registry_.end()) return VerifyResult::fail("unknown_api");
            const ToolDef& def = it->second;
            if (a.args.size() != def.params.size()) return VerifyResult::fail("bad_args");
            for (const auto& [prereq, dependent] : rules_)
                if (dependent == a.tool_name && !called.count(prereq))
                    return VerifyResult::fail("order_violation");
            for (const auto& [key, value] : def.writes)
                state[key] = resolve(value, a);
            called.insert(a.tool_name);
        }
        for (const auto& [key, want] : goal_) {
            auto it = state.find(key);
            if (it == state.end() || it->second != want) return VerifyResult::fail("goal_unmet");
        }
        return VerifyResult::ok();
    }

    const std::map<std::string, ToolDef>& registry() const { return registry_; }

private:
    static std::string resolve(const std::string& value, const ActionRecord& a) {
        if (value.size() >= 2 && value[0] == '$') {
            char* end = nullptr;
            const long idx = std::strtol(value.c_str() + 1, &end, 10);
            if (end && *end == '\0' && idx >= 1 && static_cast<std::size_t>(idx) <= a.args.size())
                return a.args[static_cast<std::size_t>(idx - 1)].second;
        }
        return value;
    }

    void validate() const {
        // Dependency graph must be acyclic: depth-first over (prereq -> dependent).
        std::map<std::string, std::vector<std::string>> adj;
        for (const auto& [prereq, dep] : rules_) adj[prereq].push_back(dep);
        std::set<std::string> done, on_stack;
        for (const auto& [tool, _] : adj)
            if (!done.count(tool) && cyclic(tool, adj, done, on_stack))
                throw DomainError("dependency rules contain a cycle");
        std::set<std::string> settable;
        for (const auto& [_, def] : registry_)
            for (const auto& [key, __] : def.writes) settable.insert(key);
        for (const auto& [key, _] : goal_)
            if (!settable.count(key))
                throw DomainError("goal key not settable by any registry tool: " + key);
    }

    static bool cyclic(const std::string& v,
                       const std::map<std::string, std::vector<std::string>>& adj,
                       std::set<std::string>& done, std::set<std::string>& on_stack) {
        on_stack.insert(v);
        if (auto it = adj.find(v); it != adj.end())
            for (const std::string& w : it->second) {
                if (on_stack.count(w)) return true;
                if (!done.count(w) && cyclic(w, adj, done, on_stack)) return true;
            }
        on_stack.erase(v);
        done.insert(v);
        return false;
    }

    std::map<std::string, ToolDef> registry_;
    std::vector<std::pair<std::string, std::string>> rules_;
    std::map<std::string, std::string> goal_;
};

/// Convenience named for the operation it performs.
inline VerifyResult toy_verify(const std::vector<ActionRecord>& path, const ToyToolEnv& env) {
    return env.verify(path);
}

// ---------------------------------------------------------------------------
// Arithmetic reasoning environment: free-form reasoning steps judged only by
// the numeric answer declared in the finish action.
// ---------------------------------------------------------------------------

class ArithmeticEnv final : public Environment {
public:
    ArithmeticEnv(std::string question, double ground_truth, std::string answer_arg = "answer")
        : question_(std::move(question)),
          ground_truth_(ground_truth),
          answer_arg_(std::move(answer_arg)) {
        if (!std::isfinite(ground_truth_)) throw DomainError("ground truth must be finite");
    }

    VerifyResult verify(const std::vector<ActionRecord>& path) const override {
        if (path.empty()) return VerifyResult::fail("empty_path");
        const ActionRecord& last = path.back();
        if (!last.is_finish) return VerifyResult::fail("not_terminal");
        const std::optional<double> answer = extract_answer(last);
        if (!answer) return VerifyResult::fail("unparseable_answer");
        const double tol = 1e-6 * std::max(1.0, std::fabs(ground_truth_));
        if (std::fabs(*answer - ground_truth_) <= tol) return VerifyResult::ok();
        return VerifyResult::fail("wrong_answer");
    }

    const std::string& question() const { return question_; }
    double ground_truth() const { return ground_truth_; }

private:
    std::optional<double> extract_answer(const ActionRecord& finish) const {
        const std::string* text = nullptr;
        for (const auto& [name, value] : finish.args)
            if (name == answer_arg_) text = &value;
        if (!text && !finish.args.empty()) text = &finish.args.front().second;
        if (!text) return std::nullopt;
        std::string t = *text;
        if (t.size() >= 2 && ((t.front() == '\'' && t.back() == '\'') ||
                              (t.front() == '"' && t.back() == '"')))
            t = t.substr(1, t.size() - 2);
        if (t.empty()) return std::nullopt;
        char* end = nullptr;
        const double v = std::strtod(t.c_str(), &end);
        if (!end || *end != '\0' || !std::isfinite(v)) return std::nullopt;
        return v;
    }

    std::string question_;
    double ground_truth_;
    std::string answer_arg_;
};

inline VerifyResult arithmetic_verify(const std::vector<ActionRecord>& path,
                                      const ArithmeticEnv& env) {
    return env.verify(path);
}

}  // namespace toolchain
