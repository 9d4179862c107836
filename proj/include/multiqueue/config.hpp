#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "multiqueue/random.hpp"

namespace multiqueue {

struct Config {
    // Expected number of concurrent threads (p). Only a hint: it feeds the
    // num_queues and capacity defaults, nothing else.
    int threads_hint = 1;
    // Queue oversubscription factor (c). num_queues defaults to ceil(c * p).
    double queue_factor = 2.0;
    // Direct override for the number of local queues; 0 means derive.
    std::size_t num_queues = 0;
    // Heap arity (d).
    unsigned arity = 8;
    // Per-queue preallocation; 0 derives from expected_prefill.
    std::size_t initial_capacity = 0;
    // Expected total element count, used for the capacity default.
    std::uint64_t expected_prefill = 1'000'000;
    std::uint64_t seed = default_seed;
    // Recheck the cached minimum against the heap after locking and retry on
    // mismatch. Off by default: a stale minimum is tolerated by design.
    bool strict_min_recheck = false;

    std::size_t resolved_num_queues() const {
        if (num_queues != 0) {
            return num_queues;
        }
        if (threads_hint < 1) {
            throw std::invalid_argument("Config: threads_hint must be positive");
        }
        if (!(queue_factor > 0.0)) {
            throw std::invalid_argument("Config: queue_factor must be positive");
        }
        return static_cast<std::size_t>(std::ceil(queue_factor * threads_hint));
    }

    // Default per-queue capacity: twice the expected average load, rounded up
    // to a power of two. Makes heap growth rare without wasting much memory.
    std::size_t resolved_capacity(std::size_t resolved_queues) const {
        if (initial_capacity != 0) {
            return initial_capacity;
        }
        const std::uint64_t per_queue = 2 * expected_prefill / resolved_queues;
        return std::bit_ceil(std::max<std::uint64_t>(per_queue, 1));
    }

    static std::uint64_t entropy_seed() {
        std::random_device device;
        return (static_cast<std::uint64_t>(device()) << 32) ^ device();
    }
};

}  // namespace multiqueue
