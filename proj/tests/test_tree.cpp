#include <doctest.h>

#include <random>

#include "toolchain/tree.hpp"

using namespace toolchain;

namespace {
ActionRecord act(const std::string& raw) { return canonicalize_action(raw); }
}  // namespace

TEST_CASE("first insertion under the root") {
    SearchTree tree;
    const NodeId a = tree.add_child(tree.root(), act("a()"));
    CHECK(a == 1);
    CHECK(tree.node(a).depth == 1);
    CHECK(*tree.node(a).parent == tree.root());
    CHECK(tree.node(a).status == NodeStatus::frontier);
}

TEST_CASE("insertion order is preserved") {
    SearchTree tree;
    const NodeId a = tree.add_child(tree.root(), act("a()"));
    const NodeId b = tree.add_child(tree.root(), act("b()"));
    CHECK(a == 1);
    CHECK(b == 2);
    CHECK(tree.node(a).insertion < tree.node(b).insertion);
}

TEST_CASE("unknown parent") {
    SearchTree tree;
    CHECK_THROWS_AS(tree.add_child(99, act("a()")), UnknownNode);
    CHECK_THROWS_AS(tree.path_to_root(99), UnknownNode);
}

TEST_CASE("path to root") {
    SearchTree tree;
    CHECK(tree.path_to_root(tree.root()).empty());

    const NodeId a = tree.add_child(tree.root(), act("a()"));
    const NodeId b = tree.add_child(a, act("b()"));
    const NodeId c = tree.add_child(a, act("c()"));

    const auto path_b = tree.path_to_root(b);
    REQUIRE(path_b.size() == 2);
    CHECK(path_b[0].canonical_key == "a()");
    CHECK(path_b[1].canonical_key == "b()");

    // Sibling isolation: c's path must not contain b.
    const auto path_c = tree.path_to_root(c);
    REQUIRE(path_c.size() == 2);
    CHECK(path_c[1].canonical_key == "c()");
}

TEST_CASE("frontier pops by (f, depth, insertion)") {
    SearchTree tree;
    tree.pop_min();  // root out of the way

    const NodeId a = tree.add_child(tree.root(), act("a()"));
    const NodeId b = tree.add_child(tree.root(), act("b()"));
    const NodeId c = tree.add_child(a, act("c()"));
    tree.node(a).f = 0.5;
    tree.node(b).f = 0.5;  // tie with a: insertion decides
    tree.node(c).f = 0.2;
    for (NodeId id : {a, b, c}) tree.enqueue(id);

    CHECK(tree.pop_min() == c);
    CHECK(tree.pop_min() == a);
    CHECK(tree.pop_min() == b);
    CHECK(tree.frontier_empty());
}

TEST_CASE("depth ties favor the shallower node") {
    SearchTree tree;
    tree.pop_min();
    const NodeId a = tree.add_child(tree.root(), act("a()"));
    const NodeId b = tree.add_child(a, act("b()"));
    tree.node(a).f = 0.7;
    tree.node(b).f = 0.7;
    tree.enqueue(b);
    tree.enqueue(a);
    CHECK(tree.pop_min() == a);
}

TEST_CASE("arena invariants over random trees") {
    std::mt19937 rng(11);
    for (int round = 0; round < 30; ++round) {
        SearchTree tree;
        for (int i = 0; i < 40; ++i) {
            const NodeId parent = static_cast<NodeId>(rng() % tree.size());
            tree.add_child(parent, act("a" + std::to_string(i) + "()"));
        }
        for (NodeId id = 1; id < tree.size(); ++id) {
            const PlanNode& n = tree.node(id);
            CHECK(*n.parent < id);  // parent indices precede children: no cycles
            CHECK(n.depth == tree.node(*n.parent).depth + 1);
            CHECK(tree.path_to_root(id).size() == static_cast<std::size_t>(n.depth));
        }
    }
}
