// Dev utility: scan seeds for the empirical sample splits the crafted suites
// and tests pin down. Not wired into any test; run by hand when (re)crafting.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "toolchain/scripted.hpp"

using namespace toolchain;

namespace {

std::map<std::string, int> counts_at(const Script& script, std::uint64_t seed,
                                     const std::vector<ActionRecord>& history, int k) {
    ScriptedBackend backend(script);
    TaskSpec task;
    task.seed = seed;
    std::map<std::string, int> counts;
    for (const auto& s : backend.sample_next(task, history, k)) ++counts[s];
    return counts;
}

Script two_way(const std::string& a, double pa, const std::string& b, double pb) {
    Script s;
    ScriptLine line;
    line.candidates = {{a, pa}, {b, pb}};
    s.lines.push_back(line);
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    const int want_a = argc > 1 ? std::atoi(argv[1]) : 6;

    // 0.6/0.4 distractor split: seeds where the distractor draws exactly want_a of 10.
    const Script root = two_way("browse()", 0.6, "pick_tool('t')", 0.4);
    std::printf("seeds with browse()=%d of 10 (p=0.6/0.4):\n", want_a);
    int found = 0;
    for (std::uint64_t seed = 0; seed < 4000 && found < 40; ++seed) {
        const auto counts = counts_at(root, seed, {}, 10);
        const auto it = counts.find("browse()");
        if (it != counts.end() && it->second == want_a) {
            std::printf("  %llu\n", static_cast<unsigned long long>(seed));
            ++found;
        }
    }

    // Three-way near-uniform split with every count <= 4 (prune-all dfs test).
    Script spread;
    ScriptLine line;
    line.candidates = {{"u()", 1.0 / 3}, {"v()", 1.0 / 3}, {"w()", 1.0 / 3}};
    spread.lines.push_back(line);
    std::printf("seeds with max count <= 4 over {u,v,w}:\n");
    found = 0;
    for (std::uint64_t seed = 0; seed < 200 && found < 10; ++seed) {
        const auto counts = counts_at(spread, seed, {}, 10);
        int mx = 0;
        for (const auto& [_, c] : counts) mx = std::max(mx, c);
        if (counts.size() == 3 && mx <= 4) {
            std::printf("  %llu\n", static_cast<unsigned long long>(seed));
            ++found;
        }
    }

    // Clean-chain sanity: correct action sampled >= 5 of 10 at three levels.
    std::printf("seeds where p=0.7 candidate draws >=5 at root:\n");
    const Script clean = two_way("set_target('x')", 0.7, "lure()", 0.3);
    found = 0;
    for (std::uint64_t seed = 0; seed < 100 && found < 10; ++seed) {
        const auto counts = counts_at(clean, seed, {}, 10);
        const auto it = counts.find("set_target('x')");
        if (it != counts.end() && it->second >= 5) {
            std::printf("  %llu (count %d)\n", static_cast<unsigned long long>(seed),
                        it->second);
            ++found;
        }
    }
    return 0;
}
