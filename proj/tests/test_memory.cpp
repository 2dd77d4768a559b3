#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "toolchain/memory.hpp"

using namespace toolchain;

namespace {

std::vector<ActionRecord> plan(std::initializer_list<const char*> raws) {
    std::vector<ActionRecord> p;
    for (const char* r : raws) p.push_back(canonicalize_action(r));
    return p;
}

MemoryStore store_of(std::initializer_list<std::vector<ActionRecord>> plans) {
    MemoryStore store;
    int i = 0;
    for (auto& p : plans) store.insert(p, "t" + std::to_string(i++), MemoryOrigin::seed);
    return store;
}

}  // namespace

TEST_CASE("lcs_score against one memory plan") {
    const auto s = canonical_keys(plan({"A()", "B()", "C()", "D()"}));
    MemoryEntry m;
    m.plan = plan({"A()", "C()", "E()", "D()"});
    m.keys = canonical_keys(m.plan);
    // 3 common (A,C,D) over min(4,4), frozen from the brute-force oracle.
    CHECK(oracles::brute_force_lcs(s, m.keys) == 3);
    CHECK(lcs_score(s, m) == doctest::Approx(0.75));
}

TEST_CASE("prefix of a plan scores 1") {
    MemoryEntry m;
    m.plan = plan({"a()", "b()", "c()", "d()"});
    m.keys = canonical_keys(m.plan);
    const auto prefix = canonical_keys(plan({"a()", "b()"}));
    CHECK(lcs_score(prefix, m) == doctest::Approx(1.0));
}

TEST_CASE("disjoint alphabets score 0") {
    MemoryEntry m;
    m.plan = plan({"x()", "y()"});
    m.keys = canonical_keys(m.plan);
    CHECK(lcs_score(canonical_keys(plan({"a()", "b()"})), m) == doctest::Approx(0.0));
}

TEST_CASE("empty prefix is degenerate") {
    MemoryEntry m;
    m.plan = plan({"a()"});
    m.keys = canonical_keys(m.plan);
    CHECK_THROWS_AS(lcs_score({}, m), DegenerateInput);
}

TEST_CASE("g1 takes the max over entries") {
    const auto store = store_of({plan({"A()", "C()", "E()", "D()"})});
    const auto s = canonical_keys(plan({"A()", "B()", "C()", "D()"}));
    CHECK(*cumulative_heuristic_g1(s, store) == doctest::Approx(0.75));

    // The query itself stored: max hits 1.
    const auto store2 =
        store_of({plan({"A()", "C()", "E()", "D()"}), plan({"A()", "B()", "C()", "D()"})});
    CHECK(*cumulative_heuristic_g1(s, store2) == doctest::Approx(1.0));

    CHECK_FALSE(cumulative_heuristic_g1(s, MemoryStore{}).has_value());
}

TEST_CASE("adding an entry never lowers g1") {
    std::mt19937 rng(5);
    const char* pool[] = {"a()", "b()", "c()", "d()"};
    for (int round = 0; round < 50; ++round) {
        std::vector<ActionRecord> query;
        const int qlen = 1 + rng() % 4;
        for (int i = 0; i < qlen; ++i) query.push_back(canonicalize_action(pool[rng() % 4]));
        const auto keys = canonical_keys(query);

        MemoryStore store;
        std::optional<double> last;
        for (int e = 0; e < 6; ++e) {
            std::vector<ActionRecord> p;
            const int plen = 1 + rng() % 5;
            for (int i = 0; i < plen; ++i) p.push_back(canonicalize_action(pool[rng() % 4]));
            store.insert(p, "t", MemoryOrigin::seed);
            const auto g1 = cumulative_heuristic_g1(keys, store);
            REQUIRE(g1.has_value());
            CHECK(*g1 >= 0.0);
            CHECK(*g1 <= 1.0);
            if (last) CHECK(*g1 >= *last);
            last = g1;
        }
    }
}

TEST_CASE("relative position averages over containing plans") {
    const auto store = store_of({plan({"a()", "b()", "c()"}), plan({"b()", "a()"})});
    const auto b = canonicalize_action("b()");
    // b sits at 2/3 in the first plan and 1/2 in the second: mean 7/12.
    CHECK(*relative_position_score(b, store) == doctest::Approx(7.0 / 12.0));
}

TEST_CASE("relative position edge cases") {
    const auto store = store_of({plan({"a()", "z()"}), plan({"b()", "c()", "z()"})});
    // Always last: score 1.
    CHECK(*relative_position_score(canonicalize_action("z()"), store) == doctest::Approx(1.0));
    // Absent everywhere.
    CHECK_FALSE(relative_position_score(canonicalize_action("q()"), store).has_value());
    // First occurrence wins on repeats.
    const auto rep = store_of({plan({"r()", "x()", "r()", "y()"})});
    CHECK(*relative_position_score(canonicalize_action("r()"), rep) == doctest::Approx(0.25));
}

TEST_CASE("h1 falls back to the lexically closest stored action") {
    // Exact match dominates: the score is that action's own positional score.
    const auto store = store_of({plan({"set_location", "search"})});
    const auto exact = canonicalize_action("search");
    CHECK(*future_heuristic_h1(exact, store) == doctest::Approx(1.0));

    // "set_locations" is closest to set_location (character-LCS ratio 1 vs 0.5,
    // checked against the brute-force oracle in test_lcs).
    const auto near = canonicalize_action("set_locations");
    CHECK(*future_heuristic_h1(near, store) == doctest::Approx(0.5));

    CHECK_FALSE(future_heuristic_h1(near, MemoryStore{}).has_value());
}

TEST_CASE("record_success appends and dedups") {
    MemoryStore store;
    record_success(store, plan({"a()", "b()"}), "task");
    CHECK(store.size() == 1);
    CHECK(store.entries()[0].origin == MemoryOrigin::learned);

    record_success(store, plan({"a( )", "b()"}), "task again");  // same canonical keys
    CHECK(store.size() == 1);

    record_success(store, plan({"a()", "c()"}), "task");
    CHECK(store.size() == 2);  // two distinct plans for one task both retained
}

TEST_CASE("score functions stay in the unit interval") {
    std::mt19937 rng(17);
    const char* pool[] = {"a()", "ab()", "abc()", "d(x=1)"};
    for (int round = 0; round < 40; ++round) {
        MemoryStore store;
        const int entries = 1 + rng() % 4;
        for (int e = 0; e < entries; ++e) {
            std::vector<ActionRecord> p;
            const int plen = 1 + rng() % 4;
            for (int i = 0; i < plen; ++i) p.push_back(canonicalize_action(pool[rng() % 4]));
            store.insert(p, "t", MemoryOrigin::seed);
        }
        const auto query = canonicalize_action(pool[rng() % 4]);
        for (const auto score : {relative_position_score(query, store),
                                 future_heuristic_h1(query, store)}) {
            if (score) {
                CHECK(*score >= 0.0);
                CHECK(*score <= 1.0);
            }
        }
    }
}

TEST_CASE("memory round-trips through line-delimited json") {
    MemoryStore store;
    store.insert(plan({"set_location('P')", "search()"}), "find homes", MemoryOrigin::seed);
    record_success(store, plan({"step one", "Finish(answer=7)"}), "math");

    std::stringstream buf;
    save_memory(store, buf);

    MemoryStore loaded;
    load_memory(loaded, buf);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded.entries()[0].keys == store.entries()[0].keys);
    CHECK(loaded.entries()[1].origin == MemoryOrigin::learned);
    CHECK(loaded.entries()[1].plan.back().is_finish);
}

TEST_CASE("memory load rejects malformed entries") {
    MemoryStore store;
    std::stringstream bad1("{\"plan\": []}\n");
    CHECK_THROWS_AS(load_memory(store, bad1), FormatError);
    std::stringstream bad2("{\"plan\": [\"Finish(answer=1)\", \"late()\"]}\n");
    CHECK_THROWS_AS(load_memory(store, bad2), FormatError);
    std::stringstream bad3("not json\n");
    CHECK_THROWS_AS(load_memory(store, bad3), FormatError);
}
