#include "multiqueue/quality.hpp"

#include <stdexcept>

#include "multiqueue/multi_queue.hpp"
#include "multiqueue/ordered_multiset.hpp"

namespace multiqueue {

namespace {

// Stream tag separating workload key draws from queue-selection draws.
constexpr std::uint64_t key_stream = 0x6b657973ULL;  // "keys"

}  // namespace

RankErrorStats simulate_quality(Config const &config, WorkloadSpec const &workload,
                                std::uint64_t n_ops, std::vector<OpLogRecord> *log_out) {
    if (workload.mode == WorkloadMode::size_sweep) {
        throw std::invalid_argument("simulate_quality: size-sweep is a driver mode, not a workload");
    }
    const bool monotonic = workload.mode == WorkloadMode::monotonic;
    if (monotonic && workload.prefill == 0) {
        throw std::invalid_argument("simulate_quality: monotonic workload needs a nonempty prefill");
    }
    if (workload.key_max >= sentinel_key) {
        throw std::invalid_argument("simulate_quality: key_max collides with the sentinel");
    }

    MultiQueue mq(config);
    MultiQueue::Handle handle = mq.get_handle();
    OrderedMultiset oracle;
    RankErrorStats stats;
    Rng key_rng(mix_seed(config.seed, key_stream));

    std::uint64_t tick = 0;
    auto log = [&](OpKind kind, Element element) {
        if (log_out != nullptr) {
            log_out->push_back(OpLogRecord{tick, 0, kind, element.key, element.payload});
        }
        ++tick;
    };

    if (log_out != nullptr) {
        log_out->reserve(workload.prefill + n_ops);
    }

    for (std::uint64_t i = 0; i < workload.prefill; ++i) {
        const Element element{key_rng.uniform_key(workload.key_max),
                              static_cast<payload_type>(i)};
        handle.push(element);
        oracle.insert(element.key);
        log(OpKind::insert, element);
    }

    std::uint64_t payload_seq = workload.prefill;
    key_type last_deleted = 0;
    for (std::uint64_t op = 0; op < n_ops; ++op) {
        const bool insert_turn = monotonic ? (op % 2 == 1) : (op % 2 == 0);
        if (insert_turn) {
            const key_type key =
                monotonic ? last_deleted + 1 + key_rng.bounded(workload.monotonic_increment_max)
                          : key_rng.uniform_key(workload.key_max);
            const Element element{key, static_cast<payload_type>(payload_seq++)};
            handle.push(element);
            oracle.insert(element.key);
            log(OpKind::insert, element);
        } else {
            const Element element = handle.pop_blocking();
            const std::uint64_t rank = oracle.count_less(element.key);
            if (!oracle.erase_one(element.key)) {
                throw std::runtime_error(
                    "simulate_quality: deleted key missing from the oracle (conservation bug)");
            }
            stats.record(rank);
            last_deleted = element.key;
            log(OpKind::remove, element);
        }
    }
    return stats;
}

RankErrorStats replay_log(std::vector<OpLogRecord> log, ReplayOptions options) {
    if (options.multi_socket && !options.force) {
        throw std::invalid_argument(
            "replay_log: refusing a multi-socket log (timestamps are not comparable across "
            "sockets); set force to override");
    }
    sort_op_log(log);
    OrderedMultiset oracle;
    RankErrorStats stats;
    for (auto const &record : log) {
        if (record.kind == OpKind::insert) {
            oracle.insert(record.key);
        } else {
            const std::uint64_t rank = oracle.count_less(record.key);
            if (!oracle.erase_one(record.key)) {
                throw std::runtime_error(
                    "replay_log: delete of a key absent from the oracle (conservation violation "
                    "or skewed timestamps)");
            }
            stats.record(rank);
        }
    }
    return stats;
}

}  // namespace multiqueue
