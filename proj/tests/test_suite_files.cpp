#include <doctest.h>

#include "toolchain/suite.hpp"

using namespace toolchain;

namespace {
const std::string kDataDir = TOOLCHAIN_DATA_DIR;
}

TEST_CASE("the smoke suite loads with bound environments") {
    const Suite suite = load_suite(kDataDir + "/suites/smoke3.json");
    CHECK(suite.name == "smoke3");
    REQUIRE(suite.tasks.size() == 3);

    const TaskDefinition& toy = suite.tasks[0];
    CHECK(toy.spec.task_id == "toy_alpha");
    CHECK(toy.spec.env_binding == "toy");
    CHECK(toy.seed_pinned);
    CHECK(toy.script.lines.size() == 3);
    REQUIRE(toy.seed_plans.size() == 1);
    CHECK(toy.seed_plans[0].size() == 3);

    const TaskDefinition& arith = suite.tasks[2];
    CHECK(arith.spec.env_binding == "arithmetic");
    // The bound environment really judges paths.
    const std::vector<ActionRecord> good = {canonicalize_action("Finish(answer=7)")};
    CHECK(arith.env->verify(good).success);
    const std::vector<ActionRecord> bad = {canonicalize_action("Finish(answer=8)")};
    CHECK_FALSE(arith.env->verify(bad).success);
}

TEST_CASE("the distractor suite pins twenty seeded tasks") {
    const Suite suite = load_suite(kDataDir + "/suites/distractor20.json");
    REQUIRE(suite.tasks.size() == 20);
    for (const TaskDefinition& task : suite.tasks) {
        CHECK(task.seed_pinned);
        CHECK(task.script.lines.size() == 4);
        CHECK(task.seed_plans.size() == 1);
        CHECK(task.spec.env_binding == "toy");
    }
}

TEST_CASE("seed plans feed the memory store") {
    const Suite suite = load_suite(kDataDir + "/suites/distractor20.json");
    MemoryStore store;
    seed_memory_from_suite(store, suite);
    CHECK(store.size() == 20);
    CHECK(store.entries()[0].origin == MemoryOrigin::seed);
    CHECK(store.entries()[0].length() == 3);
}

TEST_CASE("pinned seeds ignore the global seed, unpinned derive from it") {
    TaskDefinition pinned;
    pinned.spec.task_id = "a";
    pinned.spec.seed = 42;
    pinned.seed_pinned = true;
    CHECK(effective_seed(pinned, 1) == 42);
    CHECK(effective_seed(pinned, 2) == 42);

    TaskDefinition free;
    free.spec.task_id = "a";
    CHECK(effective_seed(free, 1) != effective_seed(free, 2));
    CHECK(effective_seed(free, 1) == effective_seed(free, 1));
}

TEST_CASE("malformed suites are rejected") {
    CHECK_THROWS_AS(load_suite("/nonexistent/suite.json"), FormatError);

    // A task needs either a registry or a ground truth.
    const auto no_env = nlohmann::json::parse(R"json({"tasks": [{"task_id": "x"}]})json");
    CHECK_THROWS_AS(parse_suite(no_env, "bad"), FormatError);

    const auto dup = nlohmann::json::parse(R"json({"tasks": [
        {"task_id": "x", "ground_truth": 1},
        {"task_id": "x", "ground_truth": 2}]})json");
    CHECK_THROWS_AS(parse_suite(dup, "bad"), FormatError);
}
