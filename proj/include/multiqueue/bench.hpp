#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multiqueue/config.hpp"
#include "multiqueue/multi_queue.hpp"
#include "multiqueue/op_log.hpp"
#include "multiqueue/workload.hpp"

namespace multiqueue {

struct ThreadCounts {
    std::uint64_t inserts = 0;
    std::uint64_t deletes = 0;
};

struct BenchResult {
    Config config;
    WorkloadSpec workload;
    std::size_t num_queues = 0;
    std::uint64_t total_ops = 0;
    double seconds = 0.0;
    double ops_per_sec = 0.0;
    std::vector<ThreadCounts> per_thread;
    // Workload phase only; prefill is excluded.
    StatsSnapshot stats;
    std::uint64_t heap_growths = 0;
    bool pinned = false;
    std::string pinning_note;
};

// Inserts n0 elements with uniform keys through one handle. Deterministic
// for a fixed seed and fresh queue.
void prefill(MultiQueue &mq, std::uint64_t n0, std::uint64_t key_max, std::uint64_t seed);

// Timed throughput run: prefill (untimed), then workload.threads workers
// each alternate insert and delete until the deadline, checking the clock
// every 1024 operations. Workers are pinned to distinct logical CPUs on a
// best-effort basis, filling one socket before the next.
BenchResult run_throughput(Config config, WorkloadSpec workload);

// One uniform throughput run per prefill size, same duration each.
std::vector<BenchResult> run_size_sweep(Config config, WorkloadSpec workload,
                                        std::vector<std::uint64_t> const &sizes);

struct VerifyResult {
    bool ok = false;
    std::string detail;  // empty when ok
    std::uint64_t inserted = 0;
    std::uint64_t deleted = 0;
    std::uint64_t drained = 0;
    BenchResult bench;
    // Present when log recording was requested; sorted, replayable.
    std::optional<std::vector<OpLogRecord>> log;
};

// Correctness-mode run: every insert (prefill included) carries a unique
// payload id, deletes and the final drain are recorded, and the element
// multisets are compared: inserted == deleted + drained, no duplicates.
// Slower than run_throughput; its throughput numbers are not comparable.
VerifyResult run_verify(Config config, WorkloadSpec workload, bool record_log = false);

}  // namespace multiqueue
