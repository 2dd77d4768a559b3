// Writes the crafted suite files under data/suites/. The outputs are
// committed; rerun this only when recrafting and re-check the pinned seeds
// with seed_probe (each distractor task must draw its lure exactly 6 of 10
// at the root).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

using nlohmann::ordered_json;

namespace {

// Seeds where the 0.6-probability candidate draws exactly 6 of 10 samples at
// the root history (from seed_probe).
const std::vector<std::uint64_t> kSixFourSeeds = {15, 17, 19, 20, 22, 37, 40, 43, 46, 52,
                                                  55, 59, 62, 67, 68, 71, 74, 81, 89, 90};

ordered_json candidate(const std::string& action, double prob) {
    return ordered_json{{"action", action}, {"prob", prob}};
}

ordered_json script_line(const std::vector<std::string>& prefix, ordered_json candidates,
                         const std::vector<std::string>& imagined = {}) {
    ordered_json line;
    line["history_key_prefix"] = prefix;
    line["candidates"] = std::move(candidates);
    if (!imagined.empty()) line["imagined_completion"] = imagined;
    return line;
}

ordered_json distractor_task(int index, std::uint64_t seed) {
    const std::string tool = "'t" + std::to_string(index) + "'";
    const std::string step1 = "pick_tool(" + tool + ")";
    const std::string step2 = "apply(" + tool + ")";
    const std::string step3 = "confirm()";

    ordered_json task;
    char id[16];
    std::snprintf(id, sizeof(id), "lure_%02d", index);
    task["task_id"] = id;
    task["description"] = "Pick tool t" + std::to_string(index) + ", apply it, then confirm.";
    task["seed"] = seed;
    task["registry"] = ordered_json{
        {"pick_tool", {{"params", {"tool"}}, {"sets", {{"tool", "$1"}}}}},
        {"apply", {{"params", {"what"}}, {"sets", {{"what", "$1"}}}}},
        {"confirm", {{"params", ordered_json::array()}, {"sets", {{"confirmed", "true"}}}}},
        {"browse", {{"params", ordered_json::array()}, {"sets", {{"browsed", "true"}}}}}};
    task["rules"] = ordered_json::array({ordered_json::array({"pick_tool", "confirm"})});
    task["goal"] = ordered_json{{"tool", tool}, {"what", tool}, {"confirmed", "true"}};
    task["script"] = ordered_json::array({
        script_line({}, ordered_json::array({candidate("browse()", 0.6), candidate(step1, 0.4)}),
                    {step1, step2, step3}),
        script_line({"browse()"},
                    ordered_json::array({candidate("wander_a()", 0.34),
                                         candidate("wander_b()", 0.33),
                                         candidate("wander_c()", 0.33)}),
                    {"almost_done()"}),
        script_line({step1},
                    ordered_json::array({candidate(step2, 0.8), candidate("wander_d()", 0.2)}),
                    {step2, step3}),
        script_line({step1, step2},
                    ordered_json::array({candidate(step3, 0.9), candidate("wander_e()", 0.1)}),
                    {step3}),
    });
    task["seed_plans"] = ordered_json::array({ordered_json::array({step1, step2, step3})});
    return task;
}

ordered_json distractor_suite() {
    ordered_json suite;
    auto& tasks = suite["tasks"] = ordered_json::array();
    for (int i = 0; i < 20; ++i) tasks.push_back(distractor_task(i, kSixFourSeeds[i]));
    return suite;
}

ordered_json clean_toy_task(const std::string& id, std::uint64_t seed, const std::string& target,
                            bool with_seed_plan) {
    const std::string step1 = "set_target(" + target + ")";
    const std::string step2 = "set_mode('fast')";
    const std::string step3 = "commit()";
    ordered_json task;
    task["task_id"] = id;
    task["description"] = "Set the target to " + target + ", pick fast mode, commit.";
    task["seed"] = seed;
    task["registry"] = ordered_json{
        {"set_target", {{"params", {"target"}}, {"sets", {{"target", "$1"}}}}},
        {"set_mode", {{"params", {"mode"}}, {"sets", {{"mode", "$1"}}}}},
        {"commit", {{"params", ordered_json::array()}, {"sets", {{"committed", "true"}}}}}};
    task["rules"] = ordered_json::array({ordered_json::array({"set_target", "commit"})});
    task["goal"] =
        ordered_json{{"target", target}, {"mode", "'fast'"}, {"committed", "true"}};
    task["script"] = ordered_json::array({
        script_line({}, ordered_json::array({candidate(step1, 0.7), candidate("lure()", 0.3)}),
                    {step1, step2, step3}),
        script_line({step1},
                    ordered_json::array({candidate(step2, 0.7), candidate("noise()", 0.3)}),
                    {step2, step3}),
        script_line({step1, step2},
                    ordered_json::array({candidate(step3, 0.8), candidate("noise()", 0.2)}),
                    {step3}),
    });
    if (with_seed_plan)
        task["seed_plans"] = ordered_json::array({ordered_json::array({step1, step2, step3})});
    return task;
}

ordered_json arithmetic_task() {
    ordered_json task;
    task["task_id"] = "arith_double_plus_one";
    task["description"] = "Start with 3, double it, then add 1.";
    task["seed"] = 11;
    task["ground_truth"] = 7;
    task["script"] = ordered_json::array({
        script_line({}, ordered_json::array({candidate("Double 3 to get 6.", 0.7),
                                             candidate("Halve 3 to get 1.5.", 0.3)}),
                    {"Double 3 to get 6.", "Add 1 to get 7.", "Finish(answer=7)"}),
        script_line({"Double 3 to get 6."},
                    ordered_json::array({candidate("Add 1 to get 7.", 0.8),
                                         candidate("Subtract 1 to get 5.", 0.2)}),
                    {"Add 1 to get 7.", "Finish(answer=7)"}),
        script_line({"Double 3 to get 6.", "Add 1 to get 7."},
                    ordered_json::array({candidate("Finish(answer=7)", 0.9),
                                         candidate("Finish(answer=5)", 0.1)}),
                    {"Finish(answer=7)"}),
        script_line({"Halve 3 to get 1.5."},
                    ordered_json::array({candidate("Finish(answer=2.5)", 1.0)}),
                    {"Finish(answer=2.5)"}),
    });
    return task;
}

ordered_json smoke_suite() {
    ordered_json suite;
    suite["tasks"] = ordered_json::array({
        clean_toy_task("toy_alpha", 0, "'alpha'", true),
        clean_toy_task("toy_beta", 5, "'beta'", false),
        arithmetic_task(),
    });
    return suite;
}

void write(const ordered_json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    std::printf("wrote %s\n", path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data/suites";
    std::filesystem::create_directories(dir);
    write(distractor_suite(), dir + "/distractor20.json");
    write(smoke_suite(), dir + "/smoke3.json");
    return 0;
}
