#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace multiqueue {

// Array heap with runtime arity. Children of node i live at d*i+1 .. d*i+d,
// so the children of one parent occupy a contiguous block. Capacity is
// managed explicitly: callers preallocate, and every doubling afterwards is
// counted so tests can assert growth stays rare.
template <typename T, typename Compare = std::less<T>>
class DAryHeap {
   public:
    static constexpr unsigned default_arity = 8;

    explicit DAryHeap(unsigned arity = default_arity, std::size_t initial_capacity = 0,
                      Compare compare = Compare{})
        : compare_(std::move(compare)), arity_(arity) {
        if (arity_ < 2) {
            throw std::invalid_argument("DAryHeap: arity must be at least 2");
        }
        reserve(initial_capacity);
    }

    // Only valid while the heap is empty.
    void set_arity(unsigned arity) {
        if (arity < 2) {
            throw std::invalid_argument("DAryHeap: arity must be at least 2");
        }
        assert(empty());
        arity_ = arity;
    }

    unsigned arity() const noexcept { return arity_; }
    bool empty() const noexcept { return storage_.empty(); }
    std::size_t size() const noexcept { return storage_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }
    std::uint64_t grow_count() const noexcept { return grow_count_; }

    void reserve(std::size_t n) {
        if (n > capacity_) {
            capacity_ = n;
            storage_.reserve(n);
        }
    }

    void push(T value) {
        if (storage_.size() == capacity_) {
            grow();
        }
        storage_.push_back(std::move(value));
        sift_up(storage_.size() - 1);
    }

    std::optional<T> pop_min() {
        if (storage_.empty()) {
            return std::nullopt;
        }
        std::optional<T> out{std::move(storage_.front())};
        if (storage_.size() > 1) {
            storage_.front() = std::move(storage_.back());
        }
        storage_.pop_back();
        if (!storage_.empty()) {
            sift_down(0);
        }
        return out;
    }

    // Pointer stays valid until the next mutation; nullptr when empty.
    const T *peek_min() const noexcept { return storage_.empty() ? nullptr : &storage_.front(); }

    void clear() noexcept { storage_.clear(); }

    // Read-only view of the backing array, for invariant checks.
    const std::vector<T> &elements() const noexcept { return storage_; }

   private:
    void grow() {
        capacity_ = capacity_ == 0 ? 16 : capacity_ * 2;
        storage_.reserve(capacity_);
        ++grow_count_;
    }

    void sift_up(std::size_t index) {
        T value = std::move(storage_[index]);
        while (index > 0) {
            const std::size_t parent = (index - 1) / arity_;
            if (!compare_(value, storage_[parent])) {
                break;
            }
            storage_[index] = std::move(storage_[parent]);
            index = parent;
        }
        storage_[index] = std::move(value);
    }

    void sift_down(std::size_t index) {
        const std::size_t count = storage_.size();
        T value = std::move(storage_[index]);
        for (;;) {
            const std::size_t first = index * arity_ + 1;
            if (first >= count) {
                break;
            }
            const std::size_t last = std::min(first + arity_, count);
            std::size_t best = first;
            for (std::size_t child = first + 1; child < last; ++child) {
                if (compare_(storage_[child], storage_[best])) {
                    best = child;
                }
            }
            if (!compare_(storage_[best], value)) {
                break;
            }
            storage_[index] = std::move(storage_[best]);
            index = best;
        }
        storage_[index] = std::move(value);
    }

    std::vector<T> storage_;
    Compare compare_;
    std::size_t capacity_ = 0;
    std::uint64_t grow_count_ = 0;
    unsigned arity_;
};

}  // namespace multiqueue
