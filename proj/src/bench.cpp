#include "multiqueue/bench.hpp"

#include <algorithm>
#include <barrier>
#include <chrono>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

namespace multiqueue {

namespace {

constexpr std::uint64_t prefill_stream = 0x66696c6cULL;  // "fill"
constexpr std::uint64_t worker_stream = 0x776f726bULL;   // "work"
// Deadline is checked once per chunk: 512 insert/delete pairs = 1024 ops.
constexpr int pairs_per_deadline_check = 512;

using Clock = std::chrono::steady_clock;

#ifdef __linux__
int read_topology_value(unsigned cpu, char const *leaf) {
    const std::string path =
        "/sys/devices/system/cpu/cpu" + std::to_string(cpu) + "/topology/" + leaf;
    std::ifstream in(path);
    int value = -1;
    if (in) {
        in >> value;
    }
    return value;
}
#endif

// Logical CPUs ordered socket-major (package, then core, then id), so
// consecutive workers fill one socket's hardware threads before spilling to
// the next. Falls back to identity order when topology is unreadable.
std::vector<unsigned> pinning_order(unsigned count) {
    std::vector<unsigned> cpus(count);
    for (unsigned i = 0; i < count; ++i) {
        cpus[i] = i;
    }
#ifdef __linux__
    std::vector<std::pair<int, int>> keys(count);
    for (unsigned i = 0; i < count; ++i) {
        keys[i] = {read_topology_value(i, "physical_package_id"),
                   read_topology_value(i, "core_id")};
    }
    std::stable_sort(cpus.begin(), cpus.end(),
                     [&](unsigned a, unsigned b) { return keys[a] < keys[b]; });
#endif
    return cpus;
}

bool pin_current_thread(unsigned cpu) {
#ifdef __linux__
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(cpu, &set);
    return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
#else
    (void)cpu;
    return false;
#endif
}

void validate_workload(WorkloadSpec const &workload) {
    if (workload.threads < 1) {
        throw std::invalid_argument("workload: threads must be positive");
    }
    if (workload.key_max >= sentinel_key) {
        throw std::invalid_argument("workload: key_max collides with the sentinel");
    }
    if (workload.mode == WorkloadMode::size_sweep) {
        throw std::invalid_argument("workload: size-sweep is a driver mode; use run_size_sweep");
    }
    if (workload.mode == WorkloadMode::monotonic &&
        workload.prefill < static_cast<std::uint64_t>(workload.threads)) {
        // Monotonic workers delete first; fewer elements than threads could
        // drain the structure empty and livelock the blocking deletes.
        throw std::invalid_argument("workload: monotonic mode needs prefill >= threads");
    }
    if (workload.mode == WorkloadMode::monotonic && workload.monotonic_increment_max < 1) {
        throw std::invalid_argument("workload: monotonic increment must be at least 1");
    }
}

std::string pinning_note(bool pinned, int threads, unsigned cpus) {
    std::string note;
    if (!pinned) {
        note = "thread pinning unavailable";
    }
    if (static_cast<unsigned>(threads) > cpus) {
        if (!note.empty()) {
            note += "; ";
        }
        note += "threads exceed logical CPUs (" + std::to_string(cpus) + "), cores are shared";
    }
    return note;
}

}  // namespace

void prefill(MultiQueue &mq, std::uint64_t n0, std::uint64_t key_max, std::uint64_t seed) {
    if (key_max >= sentinel_key) {
        throw std::invalid_argument("prefill: key_max collides with the sentinel");
    }
    MultiQueue::Handle handle = mq.get_handle();
    Rng rng(mix_seed(seed, prefill_stream));
    for (std::uint64_t i = 0; i < n0; ++i) {
        handle.push(Element{rng.uniform_key(key_max), static_cast<payload_type>(i)});
    }
}

BenchResult run_throughput(Config config, WorkloadSpec workload) {
    validate_workload(workload);
    if (workload.op_count != 0) {
        throw std::invalid_argument(
            "run_throughput is duration-bound; op-counted runs belong to run_verify");
    }

    MultiQueue mq(config);
    prefill(mq, workload.prefill, workload.key_max, config.seed);
    const StatsSnapshot after_prefill = mq.stats();

    const int threads = workload.threads;
    const unsigned cpus = std::max(1u, std::thread::hardware_concurrency());
    const auto order = pinning_order(cpus);
    const bool monotonic = workload.mode == WorkloadMode::monotonic;

    struct WorkerOutcome {
        std::uint64_t inserts = 0;
        std::uint64_t deletes = 0;
        Clock::time_point end{};
        bool pinned = false;
    };
    std::vector<WorkerOutcome> outcomes(threads);

    std::barrier gate(threads + 1);
    Clock::time_point start{};
    Clock::time_point deadline{};

    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            WorkerOutcome &out = outcomes[t];
            out.pinned = pin_current_thread(order[static_cast<unsigned>(t) % order.size()]);
            MultiQueue::Handle handle = mq.get_handle();
            Rng key_rng(mix_seed(config.seed, worker_stream + static_cast<std::uint64_t>(t)));
            gate.arrive_and_wait();
            const Clock::time_point until = deadline;
            for (;;) {
                for (int k = 0; k < pairs_per_deadline_check; ++k) {
                    if (monotonic) {
                        const Element got = handle.pop_blocking();
                        handle.push(Element{
                            got.key + 1 + key_rng.bounded(workload.monotonic_increment_max),
                            got.payload});
                    } else {
                        handle.push(Element{key_rng.uniform_key(workload.key_max),
                                            static_cast<payload_type>(k)});
                        handle.pop_blocking();
                    }
                }
                if (Clock::now() >= until) {
                    break;
                }
            }
            out.end = Clock::now();
            const StatsSnapshot mine = handle.stats();
            out.inserts = mine.inserts;
            out.deletes = mine.deletes;
        });
    }

    start = Clock::now();
    deadline = start + std::chrono::milliseconds(workload.duration_ms);
    gate.arrive_and_wait();
    for (auto &worker : workers) {
        worker.join();
    }

    BenchResult result;
    result.config = config;
    result.workload = workload;
    result.num_queues = mq.num_queues();
    result.per_thread.resize(threads);
    Clock::time_point last_end = start;
    bool all_pinned = true;
    for (int t = 0; t < threads; ++t) {
        result.per_thread[t] = ThreadCounts{outcomes[t].inserts, outcomes[t].deletes};
        result.total_ops += outcomes[t].inserts + outcomes[t].deletes;
        last_end = std::max(last_end, outcomes[t].end);
        all_pinned = all_pinned && outcomes[t].pinned;
    }
    result.seconds = std::chrono::duration<double>(last_end - start).count();
    result.ops_per_sec =
        result.seconds > 0.0 ? static_cast<double>(result.total_ops) / result.seconds : 0.0;
    result.stats = mq.stats() - after_prefill;
    result.heap_growths = mq.total_heap_growths();
    result.pinned = all_pinned;
    result.pinning_note = pinning_note(all_pinned, threads, cpus);
    return result;
}

std::vector<BenchResult> run_size_sweep(Config config, WorkloadSpec workload,
                                        std::vector<std::uint64_t> const &sizes) {
    if (sizes.empty()) {
        throw std::invalid_argument("run_size_sweep: need at least one prefill size");
    }
    std::vector<BenchResult> results;
    results.reserve(sizes.size());
    for (const std::uint64_t n0 : sizes) {
        Config run_config = config;
        if (run_config.initial_capacity == 0) {
            run_config.expected_prefill = std::max<std::uint64_t>(n0, 1);
        }
        WorkloadSpec run_workload = workload;
        run_workload.prefill = n0;
        if (run_workload.mode == WorkloadMode::size_sweep) {
            run_workload.mode = WorkloadMode::uniform;
        }
        results.push_back(run_throughput(run_config, run_workload));
    }
    return results;
}

VerifyResult run_verify(Config config, WorkloadSpec workload, bool record_log) {
    validate_workload(workload);
    const int threads = workload.threads;
    // Payload ids: slot 0 is the prefill, workers use slot t+1; 8 bits of
    // slot + 24 bits of sequence must fit the 32-bit payload.
    constexpr std::uint64_t max_seq = std::uint64_t{1} << 24;
    if (threads > 254) {
        throw std::invalid_argument("run_verify: at most 254 threads (payload id space)");
    }
    if (workload.prefill >= max_seq) {
        throw std::invalid_argument("run_verify: prefill too large for unique payload ids");
    }

    const bool quota_mode = workload.op_count != 0;
    std::vector<std::uint64_t> worker_pairs(threads, 0);
    if (quota_mode) {
        const std::uint64_t pairs_total = workload.op_count / 2;
        for (int t = 0; t < threads; ++t) {
            worker_pairs[t] = pairs_total / threads +
                              (static_cast<std::uint64_t>(t) < pairs_total % threads ? 1 : 0);
            if (worker_pairs[t] >= max_seq) {
                throw std::invalid_argument("run_verify: op_count too large for unique payload ids");
            }
        }
    }

    MultiQueue mq(config);
    OpLogRecorder recorder(static_cast<std::size_t>(threads) + 1);
    const bool monotonic = workload.mode == WorkloadMode::monotonic;

    std::vector<Element> prefill_elements;
    prefill_elements.reserve(workload.prefill);
    {
        MultiQueue::Handle handle = mq.get_handle();
        Rng rng(mix_seed(config.seed, prefill_stream));
        OpLogRecorder::Slot &slot = recorder.slot(0);
        if (record_log) {
            slot.reserve(workload.prefill);
        }
        for (std::uint64_t i = 0; i < workload.prefill; ++i) {
            const Element element{rng.uniform_key(workload.key_max),
                                  static_cast<payload_type>(i)};
            if (record_log) {
                slot.record(OpKind::insert, monotonic_tick(), element);
            }
            handle.push(element);
            prefill_elements.push_back(element);
        }
    }
    const StatsSnapshot after_prefill = mq.stats();

    const unsigned cpus = std::max(1u, std::thread::hardware_concurrency());
    const auto order = pinning_order(cpus);

    struct WorkerOutcome {
        std::vector<Element> inserted;
        std::vector<Element> deleted;
        Clock::time_point end{};
        bool pinned = false;
    };
    std::vector<WorkerOutcome> outcomes(threads);

    std::barrier gate(threads + 1);
    Clock::time_point start{};
    Clock::time_point deadline{};

    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            WorkerOutcome &out = outcomes[t];
            out.pinned = pin_current_thread(order[static_cast<unsigned>(t) % order.size()]);
            MultiQueue::Handle handle = mq.get_handle();
            Rng key_rng(mix_seed(config.seed, worker_stream + static_cast<std::uint64_t>(t)));
            OpLogRecorder::Slot &slot = recorder.slot(static_cast<std::size_t>(t) + 1);
            const payload_type slot_bits = static_cast<payload_type>(t + 1) << 24;
            std::uint64_t seq = 0;
            if (quota_mode) {
                out.inserted.reserve(worker_pairs[t]);
                out.deleted.reserve(worker_pairs[t]);
                if (record_log) {
                    slot.reserve(2 * worker_pairs[t]);
                }
            }

            // Inserts are stamped at operation start and deletes at
            // completion, so in sorted order every delete of an element
            // follows that element's insert.
            auto run_pair = [&] {
                if (monotonic) {
                    const Element got = handle.pop_blocking();
                    if (record_log) {
                        slot.record(OpKind::remove, monotonic_tick(), got);
                    }
                    out.deleted.push_back(got);
                    const Element next{
                        got.key + 1 + key_rng.bounded(workload.monotonic_increment_max),
                        slot_bits | static_cast<payload_type>(seq++)};
                    if (record_log) {
                        slot.record(OpKind::insert, monotonic_tick(), next);
                    }
                    handle.push(next);
                    out.inserted.push_back(next);
                } else {
                    const Element element{key_rng.uniform_key(workload.key_max),
                                          slot_bits | static_cast<payload_type>(seq++)};
                    if (record_log) {
                        slot.record(OpKind::insert, monotonic_tick(), element);
                    }
                    handle.push(element);
                    out.inserted.push_back(element);
                    const Element got = handle.pop_blocking();
                    if (record_log) {
                        slot.record(OpKind::remove, monotonic_tick(), got);
                    }
                    out.deleted.push_back(got);
                }
            };

            gate.arrive_and_wait();
            if (quota_mode) {
                for (std::uint64_t pair = 0; pair < worker_pairs[t]; ++pair) {
                    run_pair();
                }
            } else {
                const Clock::time_point until = deadline;
                for (;;) {
                    for (int k = 0; k < pairs_per_deadline_check; ++k) {
                        run_pair();
                    }
                    if (Clock::now() >= until) {
                        break;
                    }
                }
            }
            out.end = Clock::now();
        });
    }

    start = Clock::now();
    deadline = start + std::chrono::milliseconds(workload.duration_ms);
    gate.arrive_and_wait();
    for (auto &worker : workers) {
        worker.join();
    }

    const std::vector<Element> drained = mq.drain();

    VerifyResult result;
    result.bench.config = config;
    result.bench.workload = workload;
    result.bench.num_queues = mq.num_queues();
    result.bench.per_thread.resize(threads);
    Clock::time_point last_end = start;
    bool all_pinned = true;
    for (int t = 0; t < threads; ++t) {
        result.bench.per_thread[t] = ThreadCounts{outcomes[t].inserted.size(),
                                                  outcomes[t].deleted.size()};
        result.bench.total_ops += outcomes[t].inserted.size() + outcomes[t].deleted.size();
        last_end = std::max(last_end, outcomes[t].end);
        all_pinned = all_pinned && outcomes[t].pinned;
    }
    result.bench.seconds = std::chrono::duration<double>(last_end - start).count();
    result.bench.ops_per_sec = result.bench.seconds > 0.0
                                   ? static_cast<double>(result.bench.total_ops) / result.bench.seconds
                                   : 0.0;
    result.bench.stats = mq.stats() - after_prefill;
    result.bench.heap_growths = mq.total_heap_growths();
    result.bench.pinned = all_pinned;
    result.bench.pinning_note = pinning_note(all_pinned, threads, cpus);

    // Conservation: every inserted element is deleted or drained exactly
    // once, matched by its unique payload id, and keys must agree.
    std::unordered_map<payload_type, key_type> open;
    std::unordered_set<payload_type> consumed;
    auto fail = [&result](std::string message) {
        if (result.ok || result.detail.empty()) {
            result.detail = std::move(message);
        }
        result.ok = false;
    };
    result.ok = true;

    std::uint64_t inserted_total = 0;
    auto note_inserted = [&](std::vector<Element> const &elements) {
        inserted_total += elements.size();
        for (auto const &element : elements) {
            if (!open.emplace(element.payload, element.key).second) {
                fail("duplicate payload id inserted: " + std::to_string(element.payload));
            }
        }
    };
    open.reserve(workload.prefill + result.bench.total_ops / 2 + 1);
    note_inserted(prefill_elements);
    for (auto const &outcome : outcomes) {
        note_inserted(outcome.inserted);
    }

    std::uint64_t deleted_total = 0;
    auto consume = [&](Element const &element, char const *where) {
        auto it = open.find(element.payload);
        if (it == open.end()) {
            if (consumed.count(element.payload) != 0) {
                fail(std::string(where) + ": element returned twice, payload " +
                     std::to_string(element.payload));
            } else {
                fail(std::string(where) + ": element was never inserted, payload " +
                     std::to_string(element.payload));
            }
            return;
        }
        if (it->second != element.key) {
            fail(std::string(where) + ": key mismatch for payload " +
                 std::to_string(element.payload));
            return;
        }
        open.erase(it);
        consumed.insert(element.payload);
    };
    consumed.reserve(open.size());
    for (auto const &outcome : outcomes) {
        deleted_total += outcome.deleted.size();
        for (auto const &element : outcome.deleted) {
            consume(element, "delete");
        }
    }
    for (auto const &element : drained) {
        consume(element, "drain");
    }
    if (!open.empty()) {
        fail(std::to_string(open.size()) + " inserted element(s) neither deleted nor drained");
    }

    result.inserted = inserted_total;
    result.deleted = deleted_total;
    result.drained = drained.size();
    if (record_log) {
        result.log = recorder.merged();
    }
    return result;
}

}  // namespace multiqueue
