// Experiment runner CLI: executes algorithm x task matrices over suite files
// and writes JSONL traces plus CSV summaries.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toolchain/harness.hpp"

using namespace toolchain;

namespace {

void print_summary(const MatrixResult& result) {
    std::printf("%-10s %-14s %10s %12s %12s %12s\n", "algorithm", "suite", "success", "wall_time",
                "expanded", "calls");
    for (const SummaryRow& s : result.summary)
        std::printf("%-10s %-14s %7d/%-3d %12.4f %12.2f %12.2f\n", s.algorithm.c_str(),
                    s.suite.c_str(), s.successes, s.tasks, s.mean_wall_time,
                    s.mean_nodes_expanded, s.mean_proposer_calls);
}

void print_curves(const std::vector<CurveRow>& curves) {
    std::printf("%6s %-10s %12s %12s %12s\n", "T", "algorithm", "success_rate", "wall_time",
                "calls");
    for (const CurveRow& c : curves)
        std::printf("%6d %-10s %12.4f %12.4f %12.2f\n", c.T, c.algorithm.c_str(),
                    c.success_rate, c.mean_wall_time, c.mean_proposer_calls);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Best-first planning engine and benchmark harness"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "Run an algorithm x task matrix over a suite");

    std::string config_path;
    std::string suite_path;
    std::vector<std::string> algos;
    std::vector<std::string> ablate;
    std::string memory_in, memory_out, out_dir;
    std::vector<int> sweep;
    std::string backend;
    std::uint64_t seed = 0;
    int k = 0, T = 0, parallelism = 0, beam_width = 0;
    double alpha = -1.0, beta = -1.0, prune_threshold = -1.0;
    bool real_time = false;

    run->add_option("--config", config_path, "JSON run config (flags override it)");
    run->add_option("--suite", suite_path, "Suite file to run");
    run->add_option("--algo", algos, "Algorithms: toolchain|bfs|dfs|mcts|greedy")
        ->delimiter(',');
    run->add_option("--ablate", ablate, "Cost ablations: g1,g2,h1,h2,g,h")->delimiter(',');
    run->add_option("--memory-in", memory_in, "Seed memory file (JSONL)");
    run->add_option("--memory-out", memory_out,
                    "Write-back memory file; enables learning for the suite");
    run->add_option("--sweep-T", sweep, "Step-limit sweep; emits curves.csv instead")
        ->delimiter(',');
    run->add_option("--seed", seed, "Global seed for tasks without pinned seeds");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--backend", backend, "Proposer backend: scripted|http");
    run->add_option("--k", k, "Samples per expansion");
    run->add_option("--T", T, "Step limit per run");
    run->add_option("--alpha", alpha, "Step-cost geometric-mean weight");
    run->add_option("--beta", beta, "Future-cost geometric-mean weight");
    run->add_option("--parallelism", parallelism, "Concurrent task runs");
    run->add_option("--beam-width", beam_width, "Beam width for bfs");
    run->add_option("--prune-threshold", prune_threshold, "Step-cost prune bound for dfs");
    run->add_flag("--real-time", real_time,
                  "Measure wall-clock time instead of the deterministic call clock");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_run_config(config_path);
        if (!suite_path.empty()) cfg.suite_path = suite_path;
        if (!algos.empty()) cfg.algorithms = algos;
        for (const std::string& a : ablate)
            cfg.cost.ablations.insert(ablation_from_string(a));
        if (!memory_in.empty()) cfg.memory_in = memory_in;
        if (!memory_out.empty()) cfg.memory_out = memory_out;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!backend.empty()) cfg.backend = backend;
        if (run->count("--seed")) cfg.seed = seed;
        if (k > 0) cfg.cost.k = k;
        if (T > 0) cfg.cost.T = T;
        if (alpha >= 0.0) cfg.cost.alpha = alpha;
        if (beta >= 0.0) cfg.cost.beta = beta;
        if (parallelism > 0) cfg.parallelism = parallelism;
        if (beam_width > 0) cfg.beam_width = beam_width;
        if (prune_threshold >= 0.0) cfg.prune_threshold = prune_threshold;
        if (real_time) cfg.real_time = true;
        if (!sweep.empty()) cfg.sweep_T = sweep;

        if (!cfg.sweep_T.empty()) {
            print_curves(emit_scaling_curves(cfg, cfg.sweep_T));
        } else {
            print_summary(run_matrix(cfg));
        }
        std::printf("outputs in %s\n", cfg.out_dir.c_str());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
