#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace multiqueue {

enum class WorkloadMode {
    // Alternating insert/delete, insert first, keys uniform in {0..key_max}.
    uniform,
    // Alternating delete/insert: remove x, insert x + uniform{1..increment_max}.
    monotonic,
    // Driver-level: one uniform run per requested prefill size.
    size_sweep,
};

constexpr std::string_view to_string(WorkloadMode mode) {
    switch (mode) {
        case WorkloadMode::uniform:
            return "uniform";
        case WorkloadMode::monotonic:
            return "monotonic";
        case WorkloadMode::size_sweep:
            return "size-sweep";
    }
    return "?";
}

inline WorkloadMode workload_mode_from_string(std::string_view name) {
    if (name == "uniform") {
        return WorkloadMode::uniform;
    }
    if (name == "monotonic") {
        return WorkloadMode::monotonic;
    }
    if (name == "size-sweep") {
        return WorkloadMode::size_sweep;
    }
    throw std::invalid_argument("unknown workload mode: " + std::string(name));
}

struct WorkloadSpec {
    WorkloadMode mode = WorkloadMode::uniform;
    std::uint64_t key_max = 100'000'000;
    std::uint64_t prefill = 1'000'000;
    // Timed runs stop after duration_ms; op-counted runs (op_count > 0)
    // perform exactly that many operations instead.
    std::uint32_t duration_ms = 1000;
    std::uint64_t op_count = 0;
    int threads = 1;
    std::uint32_t monotonic_increment_max = 100;
};

}  // namespace multiqueue
