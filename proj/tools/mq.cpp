// Command line front end: throughput benchmarks, rank-error quality
// measurements, the closed-form quality model, and a conservation checker.
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "multiqueue/bench.hpp"
#include "multiqueue/quality.hpp"
#include "multiqueue/report.hpp"
#include "multiqueue/theory.hpp"

namespace {

using namespace multiqueue;

struct Options {
    int threads = 1;
    double queue_factor = 2.0;
    std::size_t num_queues = 0;
    unsigned arity = 8;
    std::uint64_t prefill = 1'000'000;
    std::uint64_t key_max = 100'000'000;
    std::uint32_t duration_ms = 1000;
    std::uint64_t ops = 0;
    std::uint64_t quality_ops = 10'000'000;
    std::string mode = "uniform";
    std::string seed_text = std::to_string(default_seed);
    bool strict = false;
    std::uint32_t increment_max = 100;
    std::vector<std::uint64_t> sizes;
    std::string output;
    std::string format = "csv";
    std::string replay_path;
    bool multi_socket = false;
    bool force = false;
    std::uint64_t k_max = 0;
    std::string record_log;
};

std::uint64_t parse_seed(std::string const &text) {
    if (text == "entropy") {
        return Config::entropy_seed();
    }
    try {
        std::size_t used = 0;
        const std::uint64_t value = std::stoull(text, &used, 0);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (std::exception const &) {
        throw CLI::ValidationError("--seed", "expected a 64-bit integer or 'entropy'");
    }
}

Config make_config(Options const &options) {
    Config config;
    config.threads_hint = options.threads;
    config.queue_factor = options.queue_factor;
    config.num_queues = options.num_queues;
    config.arity = options.arity;
    config.expected_prefill = std::max<std::uint64_t>(options.prefill, 1);
    config.seed = parse_seed(options.seed_text);
    config.strict_min_recheck = options.strict;
    return config;
}

WorkloadSpec make_workload(Options const &options) {
    WorkloadSpec workload;
    workload.mode = workload_mode_from_string(options.mode);
    workload.key_max = options.key_max;
    workload.prefill = options.prefill;
    workload.duration_ms = options.duration_ms;
    workload.op_count = options.ops;
    workload.threads = options.threads;
    workload.monotonic_increment_max = options.increment_max;
    return workload;
}

// Relative output paths land in $MQ_OUTPUT_DIR when it is set.
std::string resolve_output(std::string const &path) {
    if (path.empty()) {
        return path;
    }
    const char *dir = std::getenv("MQ_OUTPUT_DIR");
    const std::filesystem::path raw(path);
    if (dir != nullptr && *dir != '\0' && raw.is_relative()) {
        const std::filesystem::path base(dir);
        std::filesystem::create_directories(base);
        return (base / raw).string();
    }
    return path;
}

void write_file(std::string const &path, std::string const &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << content;
    if (!out.flush()) {
        throw std::runtime_error("failed writing output file: " + path);
    }
}

void add_queue_options(CLI::App *sub, Options &options) {
    sub->add_option("-p,--threads", options.threads, "Worker thread count (p)")
        ->check(CLI::PositiveNumber);
    sub->add_option("-c,--queue-factor", options.queue_factor,
                    "Queues per thread (c); num_queues defaults to ceil(c*p)");
    sub->add_option("--num-queues", options.num_queues, "Exact queue count (overrides c*p)");
    sub->add_option("-d,--arity", options.arity, "Heap arity (d >= 2)");
    sub->add_option("--seed", options.seed_text, "RNG seed: 64-bit integer or 'entropy'");
    sub->add_flag("--strict-min", options.strict,
                  "Recheck the cached minimum after locking; retry on mismatch");
}

void add_workload_options(CLI::App *sub, Options &options, bool with_sweep) {
    sub->add_option("--prefill,--n0", options.prefill, "Initial element count");
    sub->add_option("--key-max", options.key_max, "Largest workload key");
    sub->add_option("--increment-max", options.increment_max,
                    "Monotonic mode: key increment upper bound");
    const std::vector<std::string> modes =
        with_sweep ? std::vector<std::string>{"uniform", "monotonic", "size-sweep"}
                   : std::vector<std::string>{"uniform", "monotonic"};
    sub->add_option("--mode", options.mode, "Workload mode")->check(CLI::IsMember(modes));
}

void add_output_options(CLI::App *sub, Options &options) {
    sub->add_option("-o,--output", options.output,
                    "Output file (relative paths honor $MQ_OUTPUT_DIR)");
    sub->add_option("--format", options.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void print_bench_summary(BenchResult const &result) {
    std::cout << "[bench] mode=" << to_string(result.workload.mode)
              << " p=" << result.workload.threads << " queues=" << result.num_queues
              << " n0=" << result.workload.prefill << " ops=" << result.total_ops
              << " seconds=" << result.seconds << " ops_per_sec=" << result.ops_per_sec
              << " failed_locks=" << result.stats.lock_failures();
    if (!result.pinning_note.empty()) {
        std::cout << " (" << result.pinning_note << ")";
    }
    std::cout << '\n';
}

void print_quality_summary(RankErrorStats const &stats) {
    std::cout << "[quality] deletes=" << stats.total_deletes();
    if (stats.total_deletes() != 0) {
        std::cout << " mean=" << stats.mean_rank() << " quartiles(0/25/50/75/100)="
                  << stats.quantile(0.0) << '/' << stats.quantile(0.25) << '/'
                  << stats.quantile(0.5) << '/' << stats.quantile(0.75) << '/'
                  << stats.quantile(1.0);
    }
    std::cout << '\n';
}

int run_bench(Options const &options) {
    const Config config = make_config(options);
    WorkloadSpec workload = make_workload(options);
    std::vector<BenchResult> results;
    if (!options.sizes.empty()) {
        results = run_size_sweep(config, workload, options.sizes);
    } else if (workload.mode == WorkloadMode::size_sweep) {
        throw CLI::ValidationError("--mode", "size-sweep needs --sizes");
    } else {
        workload.op_count = 0;
        results.push_back(run_throughput(config, workload));
    }
    for (auto const &result : results) {
        print_bench_summary(result);
    }
    if (!options.output.empty()) {
        std::ostringstream content;
        if (options.format == "json") {
            content << bench_json(results).dump(2) << '\n';
        } else {
            write_bench_csv(content, results);
        }
        write_file(resolve_output(options.output), content.str());
    }
    return 0;
}

int run_quality(Options const &options) {
    RankErrorStats stats;
    nlohmann::ordered_json context;
    if (!options.replay_path.empty()) {
        auto records = read_op_log_file(options.replay_path);
        stats = replay_log(std::move(records), ReplayOptions{options.multi_socket, options.force});
        context["replay"] = options.replay_path;
    } else {
        const Config config = make_config(options);
        const WorkloadSpec workload = make_workload(options);
        stats = simulate_quality(config, workload, options.quality_ops);
        context = {
            {"threads", options.threads},
            {"queue_factor", options.queue_factor},
            {"num_queues", config.resolved_num_queues()},
            {"arity", options.arity},
            {"seed", config.seed},
            {"mode", options.mode},
            {"prefill", options.prefill},
            {"key_max", options.key_max},
            {"ops", options.quality_ops},
        };
    }
    print_quality_summary(stats);
    if (!options.output.empty()) {
        std::ostringstream content;
        if (options.format == "json") {
            nlohmann::ordered_json summary = quality_json(stats);
            summary["context"] = context;
            content << summary.dump(2) << '\n';
        } else {
            write_rank_csv(content, stats);
        }
        write_file(resolve_output(options.output), content.str());
    }
    return 0;
}

int run_theory(Options const &options) {
    const TheoryModel model(options.queue_factor, static_cast<unsigned>(options.threads));
    const std::uint64_t k_max =
        options.k_max != 0 ? options.k_max
                           : static_cast<std::uint64_t>(std::ceil(model.tail_threshold()));
    std::ostringstream content;
    if (options.format == "json") {
        nlohmann::ordered_json tail = nlohmann::ordered_json::array();
        for (std::uint64_t k = 0; k <= k_max; ++k) {
            tail.push_back(model.tail(k));
        }
        const nlohmann::ordered_json doc = {
            {"c", model.c()},         {"p", model.p()},
            {"q2", model.q2()},       {"expected_rank_bound", model.expected_rank()},
            {"tail_threshold", model.tail_threshold()},
            {"tail", tail},
        };
        content << doc.dump(2) << '\n';
    } else {
        write_theory_csv(content, model, k_max);
    }
    if (options.output.empty()) {
        std::cout << content.str();
    } else {
        write_file(resolve_output(options.output), content.str());
        std::cout << "[theory] c=" << model.c() << " p=" << model.p() << " q2=" << model.q2()
                  << " expected_rank_bound=" << model.expected_rank()
                  << " tail_threshold=" << model.tail_threshold() << '\n';
    }
    return 0;
}

int run_verify_cmd(Options const &options) {
    const Config config = make_config(options);
    const WorkloadSpec workload = make_workload(options);
    const bool record = !options.record_log.empty();
    const VerifyResult result = run_verify(config, workload, record);
    if (record && result.log) {
        write_op_log_file(resolve_output(options.record_log), *result.log);
    }
    if (result.ok) {
        std::cout << "[verify] PASS inserted=" << result.inserted
                  << " deleted=" << result.deleted << " drained=" << result.drained
                  << " seconds=" << result.bench.seconds << '\n';
    } else {
        std::cout << "[verify] FAIL " << result.detail << '\n';
    }
    if (!options.output.empty()) {
        std::ostringstream content;
        if (options.format == "json") {
            content << verify_json(result).dump(2) << '\n';
        } else {
            std::vector<BenchResult> row{result.bench};
            write_bench_csv(content, row);
        }
        write_file(resolve_output(options.output), content.str());
    }
    return result.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Relaxed concurrent priority queue: benchmarks and quality harness"};
    app.require_subcommand(1);
    Options options;

    CLI::App *bench = app.add_subcommand("bench", "Timed throughput runs");
    add_queue_options(bench, options);
    add_workload_options(bench, options, true);
    add_output_options(bench, options);
    bench->add_option("--duration-ms", options.duration_ms, "Timed window per run")
        ->check(CLI::PositiveNumber);
    bench->add_option("--sizes", options.sizes, "Prefill sizes for a size sweep")
        ->delimiter(',');

    CLI::App *quality = app.add_subcommand(
        "quality", "Rank-error measurement (sequential simulation or log replay)");
    add_queue_options(quality, options);
    add_workload_options(quality, options, false);
    add_output_options(quality, options);
    quality->add_option("--ops", options.quality_ops, "Operations after prefill");
    quality->add_option("--replay", options.replay_path, "Replay a recorded op log")
        ->check(CLI::ExistingFile);
    quality->add_flag("--multi-socket-log", options.multi_socket,
                      "Declare the replayed log as recorded across sockets");
    quality->add_flag("--force", options.force, "Replay a multi-socket log anyway");

    CLI::App *theory = app.add_subcommand("theory", "Closed-form rank-error model table");
    theory->add_option("-c,--queue-factor", options.queue_factor, "Queues per thread (c)");
    theory->add_option("-p,--threads", options.threads, "Thread count (p)")
        ->check(CLI::PositiveNumber);
    theory->add_option("--k-max", options.k_max,
                       "Last rank in the tail table (default: the p^-1 threshold)");
    add_output_options(theory, options);

    CLI::App *verify = app.add_subcommand(
        "verify", "Concurrent conservation check with unique payload ids");
    add_queue_options(verify, options);
    add_workload_options(verify, options, false);
    add_output_options(verify, options);
    verify->add_option("--ops", options.ops,
                       "Total operation count (0: run for --duration-ms instead)");
    verify->add_option("--duration-ms", options.duration_ms, "Timed window when --ops is 0")
        ->check(CLI::PositiveNumber);
    verify->add_option("--record-log", options.record_log,
                       "Write the timestamped op log for later replay");

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const &error) {
        return app.exit(error);
    }

    try {
        if (bench->parsed()) {
            return run_bench(options);
        }
        if (quality->parsed()) {
            return run_quality(options);
        }
        if (theory->parsed()) {
            return run_theory(options);
        }
        if (verify->parsed()) {
            return run_verify_cmd(options);
        }
    } catch (CLI::Error const &error) {
        return app.exit(error);
    } catch (std::exception const &error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 1;
}
