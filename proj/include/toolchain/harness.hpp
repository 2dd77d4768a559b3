#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "toolchain/http_backend.hpp"
#include "toolchain/memory.hpp"
#include "toolchain/scripted.hpp"
#include "toolchain/search.hpp"
#include "toolchain/suite.hpp"
#include "toolchain/trace.hpp"

namespace toolchain {

inline const std::vector<std::string> kKnownAlgorithms = {"toolchain", "bfs", "dfs", "mcts",
                                                          "greedy"};

/// One experiment matrix: which suite, which algorithms, which knobs.
struct RunConfig {
    std::string suite_path;
    std::vector<std::string> algorithms = {"toolchain"};
    CostConfig cost;
    ProposerConfig proposer;
    std::string backend = "scripted";  // "scripted" | "http"
    std::string memory_in;
    std::string memory_out;  // setting this enables write-back for the suite
    int parallelism = 1;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int beam_width = 3;
    double prune_threshold = 1.0;
    MctsConfig mcts;
    std::vector<int> sweep_T;
    double per_call_seconds = 1e-3;
    bool real_time = false;

    bool write_back() const { return !memory_out.empty(); }

    void validate() const {
        if (parallelism < 1) throw DomainError("parallelism must be >= 1");
        if (suite_path.empty()) throw DomainError("suite_path is required");
        if (algorithms.empty()) throw DomainError("at least one algorithm is required");
        for (const std::string& a : algorithms)
            if (std::find(kKnownAlgorithms.begin(), kKnownAlgorithms.end(), a) ==
                kKnownAlgorithms.end())
                throw DomainError("unknown algorithm: " + a);
        cost.validate();
        proposer.validate();
        mcts.validate();
    }
};

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError("config " + path + ": " + ex.what());
    }
    RunConfig cfg;
    cfg.suite_path = j.value("suite", "");
    if (!cfg.suite_path.empty() && cfg.suite_path.front() != '/') {
        // Suite paths are relative to the config file.
        cfg.suite_path =
            (std::filesystem::path(path).parent_path() / cfg.suite_path).string();
    }
    if (j.contains("algorithms")) {
        cfg.algorithms.clear();
        for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(a.get<std::string>());
    }
    cfg.cost.alpha = j.value("alpha", cfg.cost.alpha);
    cfg.cost.beta = j.value("beta", cfg.cost.beta);
    cfg.cost.k = j.value("k", cfg.cost.k);
    cfg.cost.T = j.value("T", cfg.cost.T);
    cfg.cost.clamp_h2 = j.value("clamp_h2", cfg.cost.clamp_h2);
    if (j.contains("ablate"))
        for (const auto& a : j.at("ablate"))
            cfg.cost.ablations.insert(ablation_from_string(a.get<std::string>()));
    cfg.proposer.temperature = j.value("temperature", cfg.proposer.temperature);
    cfg.proposer.finish_token = j.value("finish_token", cfg.proposer.finish_token);
    cfg.proposer.max_imagined_steps =
        j.value("max_imagined_steps", cfg.proposer.max_imagined_steps);
    if (j.contains("prompt_template"))
        cfg.proposer.prompt_template = j.at("prompt_template").get<std::string>();
    cfg.backend = j.value("backend", cfg.backend);
    cfg.memory_in = j.value("memory_in", cfg.memory_in);
    cfg.memory_out = j.value("memory_out", cfg.memory_out);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.beam_width = j.value("beam_width", cfg.beam_width);
    cfg.prune_threshold = j.value("prune_threshold", cfg.prune_threshold);
    cfg.mcts.exploration_c = j.value("mcts_exploration_c", cfg.mcts.exploration_c);
    cfg.mcts.rollouts_per_iteration =
        j.value("mcts_rollouts_per_iteration", cfg.mcts.rollouts_per_iteration);
    cfg.mcts.rollout_depth_cap = j.value("mcts_rollout_depth_cap", cfg.mcts.rollout_depth_cap);
    cfg.mcts.iterations = j.value("mcts_iterations", cfg.mcts.iterations);
    if (j.contains("sweep_T"))
        for (const auto& t : j.at("sweep_T")) cfg.sweep_T.push_back(t.get<int>());
    cfg.per_call_seconds = j.value("per_call_seconds", cfg.per_call_seconds);
    cfg.real_time = j.value("real_time", cfg.real_time);
    return cfg;
}

/// One (algorithm, task) run in the matrix.
struct RunRow {
    std::string algorithm;
    std::string suite;
    std::string task_id;
    std::string run_id;
    std::string outcome;  // search outcome, or "error"
    bool success = false;
    double wall_time = 0.0;
    int nodes_expanded = 0;
    std::uint64_t proposer_calls = 0;
    std::string error;
    std::vector<TraceEvent> trace;
    std::vector<ActionRecord> best_path;
};

/// Per-algorithm aggregate over the suite.
struct SummaryRow {
    std::string algorithm;
    std::string suite;
    int tasks = 0;
    int successes = 0;
    double mean_wall_time = 0.0;
    double mean_nodes_expanded = 0.0;
    double mean_proposer_calls = 0.0;

    double success_rate() const {
        return tasks == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(tasks);
    }
};

struct MatrixResult {
    std::vector<RunRow> rows;
    std::vector<SummaryRow> summary;
};

/// Scaling-curve data point: one (T, algorithm) aggregate.
struct CurveRow {
    int T = 0;
    std::string algorithm;
    double success_rate = 0.0;
    double mean_wall_time = 0.0;
    double mean_proposer_calls = 0.0;
};

namespace detail {

/// Shortest round-trip decimal form; keeps CSV output byte-stable.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::unique_ptr<ProposerBackend> make_backend(const RunConfig& cfg,
                                                     const TaskDefinition& task) {
    if (cfg.backend == "scripted") return std::make_unique<ScriptedBackend>(task.script);
    if (cfg.backend == "http") {
        auto http_cfg = HttpBackendConfig::from_env();
        http_cfg.temperature = cfg.proposer.temperature;
        return std::make_unique<HttpBackend>(std::move(http_cfg), cfg.proposer);
    }
    throw DomainError("unknown backend: " + cfg.backend);
}

inline RunRow execute_run(const RunConfig& cfg, const Suite& suite, const TaskDefinition& task,
                          const std::string& algorithm, const MemoryStore& memory,
                          const std::string& run_id) {
    RunRow row;
    row.algorithm = algorithm;
    row.suite = suite.name;
    row.task_id = task.spec.task_id;
    row.run_id = run_id;

    SearchSettings settings;
    settings.cost = cfg.cost;
    settings.proposer = cfg.proposer;
    settings.sync();
    settings.run_id = run_id;
    settings.per_call_seconds = cfg.per_call_seconds;
    settings.real_time = cfg.real_time;

    TaskSpec spec = task.spec;
    spec.seed = effective_seed(task, cfg.seed);

    try {
        auto backend = make_backend(cfg, task);
        SearchResult result;
        if (algorithm == "toolchain")
            result = toolchain_star(spec, *task.env, *backend, &memory, settings);
        else if (algorithm == "bfs")
            result = beam_bfs(spec, *task.env, *backend, settings, cfg.beam_width);
        else if (algorithm == "dfs")
            result = dfs_backtrack(spec, *task.env, *backend, settings, cfg.prune_threshold);
        else if (algorithm == "mcts")
            result = mcts_uct(spec, *task.env, *backend, &memory, settings, cfg.mcts);
        else if (algorithm == "greedy")
            result = greedy_closed_loop(spec, *task.env, *backend, settings);
        else
            throw DomainError("unknown algorithm: " + algorithm);

        row.outcome = to_string(result.outcome);
        row.success = result.outcome == SearchOutcome::success;
        row.wall_time = result.wall_time;
        row.nodes_expanded = result.nodes_expanded;
        row.proposer_calls = result.proposer_calls;
        row.trace = std::move(result.trace);
        row.best_path = std::move(result.best_path);
    } catch (const SearchAborted& e) {
        row.outcome = "error";
        row.error = e.what();
        row.wall_time = e.wall_time();
        row.nodes_expanded = e.nodes_expanded();
        row.proposer_calls = e.proposer_calls();
        row.trace = e.trace();
    } catch (const std::exception& e) {
        row.outcome = "error";
        row.error = e.what();
    }
    return row;
}

inline std::vector<SummaryRow> summarize(const std::vector<RunRow>& rows,
                                         const std::vector<std::string>& algorithms,
                                         const std::string& suite_name) {
    std::vector<SummaryRow> summary;
    for (const std::string& algo : algorithms) {
        SummaryRow s;
        s.algorithm = algo;
        s.suite = suite_name;
        double wall = 0.0, expanded = 0.0, calls = 0.0;
        for (const RunRow& r : rows) {
            if (r.algorithm != algo) continue;
            ++s.tasks;
            if (r.success) ++s.successes;
            wall += r.wall_time;
            expanded += r.nodes_expanded;
            calls += static_cast<double>(r.proposer_calls);
        }
        if (s.tasks > 0) {
            s.mean_wall_time = wall / s.tasks;
            s.mean_nodes_expanded = expanded / s.tasks;
            s.mean_proposer_calls = calls / s.tasks;
        }
        summary.push_back(std::move(s));
    }
    return summary;
}

inline void write_runs_csv(const std::vector<RunRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "algorithm,suite,task_id,run_id,outcome,wall_time,nodes_expanded,proposer_calls,error\n";
    for (const RunRow& r : rows)
        out << r.algorithm << ',' << r.suite << ',' << r.task_id << ',' << r.run_id << ','
            << r.outcome << ',' << format_double(r.wall_time) << ',' << r.nodes_expanded << ','
            << r.proposer_calls << ',' << r.error << "\n";
}

inline void write_summary_csv(const std::vector<SummaryRow>& summary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "algorithm,suite,success_rate,mean_wall_time,mean_nodes_expanded,mean_proposer_calls\n";
    for (const SummaryRow& s : summary)
        out << s.algorithm << ',' << s.suite << ',' << format_double(s.success_rate()) << ','
            << format_double(s.mean_wall_time) << ',' << format_double(s.mean_nodes_expanded)
            << ',' << format_double(s.mean_proposer_calls) << "\n";
}

inline void write_curves_csv(const std::vector<CurveRow>& curves, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "T,algorithm,success_rate,mean_wall_time,mean_proposer_calls\n";
    for (const CurveRow& c : curves)
        out << c.T << ',' << c.algorithm << ',' << format_double(c.success_rate) << ','
            << format_double(c.mean_wall_time) << ',' << format_double(c.mean_proposer_calls)
            << "\n";
}

/// Execute the whole algorithm x task matrix over one loaded suite.
/// write_back mutates the store between runs, so it forces sequential
/// execution in suite file order.
inline MatrixResult run_matrix_on(const RunConfig& cfg, const Suite& suite, MemoryStore& memory,
                                  const std::string& run_id_suffix) {
    std::vector<std::pair<std::string, const TaskDefinition*>> runs;
    for (const std::string& algo : cfg.algorithms)
        for (const TaskDefinition& task : suite.tasks) runs.emplace_back(algo, &task);

    MatrixResult result;
    result.rows.resize(runs.size());
    const auto run_one = [&](std::size_t i) {
        const auto& [algo, task] = runs[i];
        const std::string run_id = algo + "__" + task->spec.task_id + run_id_suffix;
        result.rows[i] = execute_run(cfg, suite, *task, algo, memory, run_id);
    };

    const bool sequential = cfg.write_back() || cfg.parallelism == 1;
    if (sequential) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            run_one(i);
            if (cfg.write_back() && result.rows[i].success)
                record_success(memory, result.rows[i].best_path, runs[i].second->spec.description);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int n = std::min<int>(cfg.parallelism, static_cast<int>(runs.size()));
        for (int w = 0; w < n; ++w)
            workers.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (std::thread& t : workers) t.join();
    }

    result.summary = summarize(result.rows, cfg.algorithms, suite.name);
    return result;
}

}  // namespace detail

/// Run the full matrix: every algorithm against every task, traces and CSVs
/// written under cfg.out_dir. Per-run errors become failed rows and never
/// abort the matrix.
inline MatrixResult run_matrix(const RunConfig& cfg) {
    cfg.validate();
    const Suite suite = load_suite(cfg.suite_path, cfg.proposer.finish_token);

    MemoryStore memory;
    seed_memory_from_suite(memory, suite, cfg.proposer.finish_token);
    if (!cfg.memory_in.empty())
        load_memory_file(memory, cfg.memory_in, cfg.proposer.finish_token);

    MatrixResult result = detail::run_matrix_on(cfg, suite, memory, "");

    namespace fs = std::filesystem;
    fs::create_directories(fs::path(cfg.out_dir) / "traces");
    for (const RunRow& row : result.rows)
        write_trace_file(row.trace, (fs::path(cfg.out_dir) / "traces" / (row.run_id + ".jsonl")).string());
    detail::write_runs_csv(result.rows, (fs::path(cfg.out_dir) / "runs.csv").string());
    detail::write_summary_csv(result.summary, (fs::path(cfg.out_dir) / "summary.csv").string());

    if (cfg.write_back()) save_memory_file(memory, cfg.memory_out);
    return result;
}

/// Re-run the suite once per step limit in the sweep and emit plot-ready
/// rows. Each T gets a fresh memory store so points stay independent.
inline std::vector<CurveRow> emit_scaling_curves(const RunConfig& cfg,
                                                 const std::vector<int>& sweep) {
    cfg.validate();
    if (sweep.empty()) throw DomainError("sweep must be nonempty");
    const Suite suite = load_suite(cfg.suite_path, cfg.proposer.finish_token);

    std::vector<CurveRow> curves;
    for (const int T : sweep) {
        RunConfig point = cfg;
        point.cost.T = T;
        MemoryStore memory;
        seed_memory_from_suite(memory, suite, point.proposer.finish_token);
        if (!point.memory_in.empty())
            load_memory_file(memory, point.memory_in, point.proposer.finish_token);
        const MatrixResult res =
            detail::run_matrix_on(point, suite, memory, "__T" + std::to_string(T));
        for (const SummaryRow& s : res.summary) {
            CurveRow c;
            c.T = T;
            c.algorithm = s.algorithm;
            c.success_rate = s.success_rate();
            c.mean_wall_time = s.mean_wall_time;
            c.mean_proposer_calls = s.mean_proposer_calls;
            curves.push_back(std::move(c));
        }
    }
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    detail::write_curves_csv(curves, (fs::path(cfg.out_dir) / "curves.csv").string());
    return curves;
}

}  // namespace toolchain
