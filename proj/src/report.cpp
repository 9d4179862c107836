#include "multiqueue/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>

namespace multiqueue {

namespace {

std::string format_double(double value, char const *spec = "%.6f") {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), spec, value);
    return buffer;
}

nlohmann::ordered_json stats_json(StatsSnapshot const &stats) {
    return {
        {"inserts", stats.inserts},
        {"deletes", stats.deletes},
        {"empty_deletes", stats.empty_deletes},
        {"insert_lock_attempts", stats.insert_lock_attempts},
        {"insert_lock_failures", stats.insert_lock_failures},
        {"delete_lock_attempts", stats.delete_lock_attempts},
        {"delete_lock_failures", stats.delete_lock_failures},
        {"strict_retries", stats.strict_retries},
        {"mean_lock_attempts_per_op", stats.mean_lock_attempts_per_op()},
    };
}

}  // namespace

void write_bench_csv(std::ostream &out, std::vector<BenchResult> const &results) {
    out << "p,c,num_queues,n0,mode,ops,seconds,ops_per_sec,failed_locks\n";
    for (auto const &result : results) {
        out << result.workload.threads << ',' << result.config.queue_factor << ','
            << result.num_queues << ',' << result.workload.prefill << ','
            << to_string(result.workload.mode) << ',' << result.total_ops << ','
            << format_double(result.seconds) << ',' << format_double(result.ops_per_sec, "%.1f")
            << ',' << result.stats.lock_failures() << '\n';
    }
}

nlohmann::ordered_json bench_json(BenchResult const &result) {
    nlohmann::ordered_json per_thread = nlohmann::ordered_json::array();
    for (auto const &counts : result.per_thread) {
        per_thread.push_back({{"inserts", counts.inserts}, {"deletes", counts.deletes}});
    }
    return {
        {"config",
         {
             {"threads_hint", result.config.threads_hint},
             {"queue_factor", result.config.queue_factor},
             {"num_queues", result.num_queues},
             {"arity", result.config.arity},
             {"seed", result.config.seed},
             {"strict_min_recheck", result.config.strict_min_recheck},
         }},
        {"workload",
         {
             {"mode", to_string(result.workload.mode)},
             {"threads", result.workload.threads},
             {"prefill", result.workload.prefill},
             {"key_max", result.workload.key_max},
             {"duration_ms", result.workload.duration_ms},
             {"op_count", result.workload.op_count},
         }},
        {"total_ops", result.total_ops},
        {"seconds", result.seconds},
        {"ops_per_sec", result.ops_per_sec},
        {"per_thread", per_thread},
        {"stats", stats_json(result.stats)},
        {"heap_growths", result.heap_growths},
        {"pinned", result.pinned},
        {"pinning_note", result.pinning_note},
    };
}

nlohmann::ordered_json bench_json(std::vector<BenchResult> const &results) {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (auto const &result : results) {
        array.push_back(bench_json(result));
    }
    return array;
}

void write_rank_csv(std::ostream &out, RankErrorStats const &stats) {
    out << "rank,count\n";
    stats.for_each([&](std::uint64_t rank, std::uint64_t count) {
        out << rank << ',' << count << '\n';
    });
}

nlohmann::ordered_json quality_json(RankErrorStats const &stats) {
    nlohmann::ordered_json quartiles;
    for (const double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const auto label = std::to_string(static_cast<int>(q * 100));
        quartiles[label] = stats.total_deletes() == 0 ? 0 : stats.quantile(q);
    }
    return {
        {"total_deletes", stats.total_deletes()},
        {"mean_rank", stats.mean_rank()},
        {"max_rank", stats.max_rank()},
        {"quartiles", quartiles},
    };
}

void write_theory_csv(std::ostream &out, TheoryModel const &model, std::uint64_t k_max) {
    out << "k,tail\n";
    for (std::uint64_t k = 0; k <= k_max; ++k) {
        out << k << ',' << format_double(model.tail(k), "%.12g") << '\n';
    }
}

nlohmann::ordered_json verify_json(VerifyResult const &result) {
    return {
        {"ok", result.ok},
        {"detail", result.detail},
        {"inserted", result.inserted},
        {"deleted", result.deleted},
        {"drained", result.drained},
        {"bench", bench_json(result.bench)},
    };
}

}  // namespace multiqueue
