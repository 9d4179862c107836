#pragma once

#include <cstdint>
#include <vector>

#include "multiqueue/config.hpp"
#include "multiqueue/op_log.hpp"
#include "multiqueue/rank_stats.hpp"
#include "multiqueue/workload.hpp"

namespace multiqueue {

// Sequential quality measurement: drives a MultiQueue with ceil(c*p) queues
// from a single thread (p enters only through the queue count), shadowing
// every operation in an ordered multiset and recording the rank error of
// each deletion. Deterministic and bit-reproducible for a fixed seed.
//
// n_ops operations follow the prefill, alternating strictly; uniform mode
// inserts first, monotonic mode deletes first. When log_out is non-null the
// run is also logged with synthetic tick timestamps, suitable for replay.
RankErrorStats simulate_quality(Config const &config, WorkloadSpec const &workload,
                                std::uint64_t n_ops, std::vector<OpLogRecord> *log_out = nullptr);

struct ReplayOptions {
    // Declares that the log was recorded across sockets (timestamps not
    // comparable). Refused unless force is set.
    bool multi_socket = false;
    bool force = false;
};

// Replays a recorded operation log through the rank oracle in global
// timestamp order. A delete whose key is absent from the oracle throws:
// either the log violates conservation or its timestamps are skewed.
RankErrorStats replay_log(std::vector<OpLogRecord> log, ReplayOptions options = {});

}  // namespace multiqueue
