#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolchain/env.hpp"
#include "toolchain/errors.hpp"
#include "toolchain/memory.hpp"
#include "toolchain/rng.hpp"
#include "toolchain/scripted.hpp"
#include "toolchain/task.hpp"

namespace toolchain {

/// One task bundled with everything that makes its run reproducible: the
/// bound environment, the proposer script, and optional memory seed plans.
struct TaskDefinition {
    TaskSpec spec;
    bool seed_pinned = false;  // true when the suite file fixes the seed
    std::shared_ptr<Environment> env;
    Script script;
    std::vector<std::vector<std::string>> seed_plans;  // raw action texts
};

struct Suite {
    std::string name;
    std::vector<TaskDefinition> tasks;
};

namespace detail {

inline std::map<std::string, ToolDef> parse_registry(const nlohmann::json& j) {
    std::map<std::string, ToolDef> registry;
    for (auto it = j.begin(); it != j.end(); ++it) {
        ToolDef def;
        if (it.value().contains("params"))
            for (const auto& p : it.value().at("params")) def.params.push_back(p.get<std::string>());
        if (it.value().contains("sets"))
            for (auto s = it.value().at("sets").begin(); s != it.value().at("sets").end(); ++s)
                def.writes.emplace_back(s.key(), s.value().get<std::string>());
        registry.emplace(it.key(), std::move(def));
    }
    return registry;
}

}  // namespace detail

/// Parse one task object. The environment kind is inferred: a ground_truth
/// field means arithmetic reasoning, a registry means the toy tool world.
inline TaskDefinition parse_task(const nlohmann::json& j,
                                 std::string_view finish_token = kDefaultFinishToken) {
    TaskDefinition task;
    task.spec.task_id = j.at("task_id").get<std::string>();
    task.spec.description = j.value("description", "");
    if (j.contains("seed")) {
        task.spec.seed = j.at("seed").get<std::uint64_t>();
        task.seed_pinned = true;
    }

    if (j.contains("ground_truth")) {
        task.spec.env_binding = "arithmetic";
        task.env = std::make_shared<ArithmeticEnv>(task.spec.description,
                                                   j.at("ground_truth").get<double>());
    } else if (j.contains("registry")) {
        task.spec.env_binding = "toy";
        std::vector<std::pair<std::string, std::string>> rules;
        if (j.contains("rules"))
            for (const auto& r : j.at("rules"))
                rules.emplace_back(r.at(0).get<std::string>(), r.at(1).get<std::string>());
        std::map<std::string, std::string> goal;
        if (j.contains("goal"))
            for (auto it = j.at("goal").begin(); it != j.at("goal").end(); ++it)
                goal.emplace(it.key(), it.value().get<std::string>());
        task.env = std::make_shared<ToyToolEnv>(detail::parse_registry(j.at("registry")),
                                                std::move(rules), std::move(goal));
    } else {
        throw FormatError("task " + task.spec.task_id + ": neither registry nor ground_truth");
    }

    if (j.contains("script")) task.script = parse_script(j.at("script"), finish_token);
    if (j.contains("seed_plans"))
        for (const auto& plan : j.at("seed_plans")) {
            std::vector<std::string> raws;
            for (const auto& a : plan) raws.push_back(a.get<std::string>());
            task.seed_plans.push_back(std::move(raws));
        }
    return task;
}

inline Suite parse_suite(const nlohmann::json& j, std::string name,
                         std::string_view finish_token = kDefaultFinishToken) {
    Suite suite;
    suite.name = std::move(name);
    std::map<std::string, bool> seen;
    for (const auto& t : j.at("tasks")) {
        TaskDefinition task = parse_task(t, finish_token);
        if (seen.count(task.spec.task_id))
            throw FormatError("duplicate task_id in suite: " + task.spec.task_id);
        seen[task.spec.task_id] = true;
        suite.tasks.push_back(std::move(task));
    }
    return suite;
}

inline Suite load_suite(const std::string& path,
                        std::string_view finish_token = kDefaultFinishToken) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open suite file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError("suite " + path + ": " + ex.what());
    }
    return parse_suite(j, std::filesystem::path(path).stem().string(), finish_token);
}

/// The sampling seed a run actually uses: suite-pinned seeds are absolute so
/// crafted suites replay identically under any global seed; unpinned tasks
/// derive their seed from the global one.
inline std::uint64_t effective_seed(const TaskDefinition& task, std::uint64_t global_seed) {
    if (task.seed_pinned) return task.spec.seed;
    return mix64(global_seed ^ fnv1a64(task.spec.task_id));
}

/// Load every task's seed plans into the store (origin = seed).
inline void seed_memory_from_suite(MemoryStore& store, const Suite& suite,
                                   std::string_view finish_token = kDefaultFinishToken) {
    for (const TaskDefinition& task : suite.tasks)
        for (const auto& raws : task.seed_plans) {
            std::vector<ActionRecord> plan;
            for (const std::string& raw : raws)
                plan.push_back(canonicalize_action(raw, finish_token));
            if (plan.empty())
                throw FormatError("task " + task.spec.task_id + ": empty seed plan");
            for (std::size_t i = 0; i + 1 < plan.size(); ++i)
                if (plan[i].is_finish)
                    throw FormatError("task " + task.spec.task_id +
                                      ": finish action before the last position in seed plan");
            store.insert(std::move(plan), task.spec.description, MemoryOrigin::seed);
        }
}

}  // namespace toolchain
