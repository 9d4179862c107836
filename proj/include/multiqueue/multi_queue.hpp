#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "multiqueue/config.hpp"
#include "multiqueue/d_ary_heap.hpp"
#include "multiqueue/element.hpp"
#include "multiqueue/random.hpp"

namespace multiqueue {

inline constexpr std::size_t cache_line_size = 64;

// Monotone operation counters. Snapshots taken while other threads run are
// approximate; after all handles are destroyed they are exact.
struct StatsSnapshot {
    std::uint64_t inserts = 0;
    std::uint64_t deletes = 0;
    std::uint64_t empty_deletes = 0;
    std::uint64_t insert_lock_attempts = 0;
    std::uint64_t insert_lock_failures = 0;
    std::uint64_t delete_lock_attempts = 0;
    std::uint64_t delete_lock_failures = 0;
    std::uint64_t strict_retries = 0;

    std::uint64_t lock_attempts() const noexcept {
        return insert_lock_attempts + delete_lock_attempts;
    }
    std::uint64_t lock_failures() const noexcept {
        return insert_lock_failures + delete_lock_failures;
    }
    std::uint64_t completed_ops() const noexcept { return inserts + deletes + empty_deletes; }
    double mean_lock_attempts_per_op() const noexcept {
        const std::uint64_t ops = completed_ops();
        return ops == 0 ? 0.0 : static_cast<double>(lock_attempts()) / static_cast<double>(ops);
    }

    StatsSnapshot &operator+=(StatsSnapshot const &other) noexcept {
        inserts += other.inserts;
        deletes += other.deletes;
        empty_deletes += other.empty_deletes;
        insert_lock_attempts += other.insert_lock_attempts;
        insert_lock_failures += other.insert_lock_failures;
        delete_lock_attempts += other.delete_lock_attempts;
        delete_lock_failures += other.delete_lock_failures;
        strict_retries += other.strict_retries;
        return *this;
    }

    friend StatsSnapshot operator-(StatsSnapshot lhs, StatsSnapshot const &rhs) noexcept {
        lhs.inserts -= rhs.inserts;
        lhs.deletes -= rhs.deletes;
        lhs.empty_deletes -= rhs.empty_deletes;
        lhs.insert_lock_attempts -= rhs.insert_lock_attempts;
        lhs.insert_lock_failures -= rhs.insert_lock_failures;
        lhs.delete_lock_attempts -= rhs.delete_lock_attempts;
        lhs.delete_lock_failures -= rhs.delete_lock_failures;
        lhs.strict_retries -= rhs.strict_retries;
        return lhs;
    }
};

namespace detail {

// One cache line of per-handle counters. Only the owning thread writes, so
// increments are plain load/store; concurrent readers see slightly stale
// but never torn values.
struct alignas(cache_line_size) CounterBlock {
    std::atomic<std::uint64_t> inserts{0};
    std::atomic<std::uint64_t> deletes{0};
    std::atomic<std::uint64_t> empty_deletes{0};
    std::atomic<std::uint64_t> insert_lock_attempts{0};
    std::atomic<std::uint64_t> insert_lock_failures{0};
    std::atomic<std::uint64_t> delete_lock_attempts{0};
    std::atomic<std::uint64_t> delete_lock_failures{0};
    std::atomic<std::uint64_t> strict_retries{0};

    void add_into(StatsSnapshot &sink) const noexcept {
        sink.inserts += inserts.load(std::memory_order_relaxed);
        sink.deletes += deletes.load(std::memory_order_relaxed);
        sink.empty_deletes += empty_deletes.load(std::memory_order_relaxed);
        sink.insert_lock_attempts += insert_lock_attempts.load(std::memory_order_relaxed);
        sink.insert_lock_failures += insert_lock_failures.load(std::memory_order_relaxed);
        sink.delete_lock_attempts += delete_lock_attempts.load(std::memory_order_relaxed);
        sink.delete_lock_failures += delete_lock_failures.load(std::memory_order_relaxed);
        sink.strict_retries += strict_retries.load(std::memory_order_relaxed);
    }
};

inline void bump(std::atomic<std::uint64_t> &counter) noexcept {
    counter.store(counter.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
}

}  // namespace detail

// One lock-protected sequential queue slot. The lock flag and the cached
// minimum share a cache line so two-choice comparisons touch one line per
// candidate without locking. cached_min read without the lock may be stale;
// at every lock release it equals the heap minimum.
struct alignas(cache_line_size) LocalQueue {
    std::atomic<key_type> cached_min{sentinel_key};
    std::atomic_flag in_use{};
    DAryHeap<Element, ElementKeyLess> heap{};

    bool try_lock() noexcept { return !in_use.test_and_set(std::memory_order_acquire); }

    // Publishes the current heap minimum, then releases. The release store
    // orders both the heap mutations and the cached_min update before the
    // next acquisition.
    void unlock() noexcept {
        const Element *top = heap.peek_min();
        cached_min.store(top ? top->key : sentinel_key, std::memory_order_relaxed);
        in_use.clear(std::memory_order_release);
    }

    key_type min_hint() const noexcept { return cached_min.load(std::memory_order_relaxed); }
};

// Relaxed concurrent priority queue: an array of lock-protected sequential
// heaps. Inserts go to a uniformly random queue; deleteMin pops from the
// better of two random candidates, compared by their cached minima.
//
// All operations run through per-thread handles (get_handle()); the handle
// owns the thread's generator and counters and must not outlive the queue.
class MultiQueue {
   public:
    class Handle {
       public:
        Handle(Handle &&other) noexcept
            : mq_(std::exchange(other.mq_, nullptr)),
              counters_(std::move(other.counters_)),
              rng_(other.rng_),
              id_(other.id_) {}
        Handle(Handle const &) = delete;
        Handle &operator=(Handle const &) = delete;
        Handle &operator=(Handle &&) = delete;

        ~Handle() {
            if (mq_ != nullptr && counters_ != nullptr) {
                mq_->retire_counters(counters_.get());
            }
        }

        std::uint64_t id() const noexcept { return id_; }

        // Inserts into a uniformly random queue, retrying with a fresh index
        // on every failed try-lock. Never waits on a held lock.
        void push(Element element) {
            assert(element.key != sentinel_key);
            auto &queues = mq_->queues_;
            const std::size_t count = queues.size();
            for (;;) {
                const std::size_t index = rng_.bounded(count);
                detail::bump(counters_->insert_lock_attempts);
                if (queues[index].try_lock()) {
                    queues[index].heap.push(element);
                    queues[index].unlock();
                    detail::bump(counters_->inserts);
                    return;
                }
                detail::bump(counters_->insert_lock_failures);
            }
        }

        // Two-choice deleteMin. Samples two independent queue indices (they
        // may collide), prefers the smaller cached minimum, and restarts the
        // whole sampling when the try-lock fails. Returns nullopt when both
        // candidates look empty; that is not proof the structure is empty.
        std::optional<Element> try_pop() {
            auto &queues = mq_->queues_;
            const std::size_t count = queues.size();
            const bool strict = mq_->config_.strict_min_recheck;
            for (;;) {
                std::size_t index = rng_.bounded(count);
                const std::size_t other = rng_.bounded(count);
                key_type best = queues[index].min_hint();
                const key_type alt = queues[other].min_hint();
                if (alt < best) {
                    index = other;
                    best = alt;
                }
                if (best == sentinel_key) {
                    detail::bump(counters_->empty_deletes);
                    return std::nullopt;
                }
                detail::bump(counters_->delete_lock_attempts);
                if (!queues[index].try_lock()) {
                    detail::bump(counters_->delete_lock_failures);
                    continue;
                }
                if (strict) {
                    const Element *top = queues[index].heap.peek_min();
                    if (top == nullptr || top->key != best) {
                        queues[index].unlock();
                        detail::bump(counters_->strict_retries);
                        continue;
                    }
                }
                std::optional<Element> popped = queues[index].heap.pop_min();
                queues[index].unlock();
                if (!popped) {
                    // Raced with a pop that emptied this queue after the
                    // hint was read.
                    detail::bump(counters_->empty_deletes);
                    return std::nullopt;
                }
                detail::bump(counters_->deletes);
                return popped;
            }
        }

        // Retries try_pop until an element is found. Livelocks if the queue
        // is and stays empty; callers must guarantee eventual nonemptiness.
        Element pop_blocking() {
            for (;;) {
                if (auto element = try_pop()) {
                    return *element;
                }
            }
        }

        // Counters of this handle alone.
        StatsSnapshot stats() const noexcept {
            StatsSnapshot snapshot;
            counters_->add_into(snapshot);
            return snapshot;
        }

       private:
        friend class MultiQueue;

        Handle(MultiQueue &mq, std::uint64_t id)
            : mq_(&mq),
              counters_(std::make_unique<detail::CounterBlock>()),
              rng_(mix_seed(mq.config_.seed, id)),
              id_(id) {
            mq_->register_counters(counters_.get());
        }

        MultiQueue *mq_;
        std::unique_ptr<detail::CounterBlock> counters_;
        Rng rng_;
        std::uint64_t id_;
    };

    explicit MultiQueue(Config config) : config_(config), num_queues_(config_.resolved_num_queues()) {
        if (num_queues_ == 0) {
            throw std::invalid_argument("MultiQueue: num_queues must be positive");
        }
        if (config_.arity < 2) {
            throw std::invalid_argument("MultiQueue: heap arity must be at least 2");
        }
        const std::size_t capacity = config_.resolved_capacity(num_queues_);
        queues_ = std::vector<LocalQueue>(num_queues_);
        for (auto &queue : queues_) {
            queue.heap.set_arity(config_.arity);
            queue.heap.reserve(capacity);
        }
    }

    MultiQueue(MultiQueue const &) = delete;
    MultiQueue &operator=(MultiQueue const &) = delete;

    // Handle ids are assigned in call order; with a fixed seed, acquiring
    // handles in a deterministic order makes runs reproducible.
    Handle get_handle() { return Handle(*this, next_handle_id_.fetch_add(1, std::memory_order_relaxed)); }

    std::size_t num_queues() const noexcept { return num_queues_; }
    Config const &config() const noexcept { return config_; }

    // Unlocked read of a queue's cached minimum (may be stale).
    key_type queue_min_hint(std::size_t index) const {
        return queues_.at(index).min_hint();
    }

    // Quiescent-only debug accessors.
    std::size_t queue_size(std::size_t index) const { return queues_.at(index).heap.size(); }
    std::uint64_t total_heap_growths() const {
        std::uint64_t total = 0;
        for (auto const &queue : queues_) {
            total += queue.heap.grow_count();
        }
        return total;
    }

    StatsSnapshot stats() const {
        std::scoped_lock lock(stats_mutex_);
        StatsSnapshot snapshot = retired_;
        for (auto const *block : live_counters_) {
            block->add_into(snapshot);
        }
        return snapshot;
    }

    // Empties every queue and returns the contents grouped by queue, each
    // group in ascending key order. Debug/teardown helper: requires
    // quiescence and throws if any lock is held.
    std::vector<std::vector<Element>> drain_queues() {
        std::vector<std::vector<Element>> out(num_queues_);
        for (std::size_t index = 0; index < num_queues_; ++index) {
            auto &queue = queues_[index];
            if (!queue.try_lock()) {
                throw std::logic_error("MultiQueue::drain requires a quiescent queue");
            }
            out[index].reserve(queue.heap.size());
            while (auto element = queue.heap.pop_min()) {
                out[index].push_back(*element);
            }
            queue.unlock();
        }
        return out;
    }

    std::vector<Element> drain() {
        std::vector<Element> out;
        for (auto &group : drain_queues()) {
            out.insert(out.end(), group.begin(), group.end());
        }
        return out;
    }

   private:
    friend class Handle;

    void register_counters(detail::CounterBlock const *block) {
        std::scoped_lock lock(stats_mutex_);
        live_counters_.push_back(block);
    }

    void retire_counters(detail::CounterBlock const *block) {
        std::scoped_lock lock(stats_mutex_);
        live_counters_.erase(std::find(live_counters_.begin(), live_counters_.end(), block));
        block->add_into(retired_);
    }

    Config config_;
    std::size_t num_queues_;
    std::vector<LocalQueue> queues_;
    std::atomic<std::uint64_t> next_handle_id_{0};
    mutable std::mutex stats_mutex_;
    std::vector<detail::CounterBlock const *> live_counters_;
    StatsSnapshot retired_;
};

}  // namespace multiqueue
