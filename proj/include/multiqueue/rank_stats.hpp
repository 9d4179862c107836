#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace multiqueue {

// Histogram of per-delete rank errors. Ranks below 2^16 land in a dense
// array (the overwhelmingly common case); the rest go to a sparse map so a
// single outlier cannot blow up memory.
class RankErrorStats {
   public:
    static constexpr std::uint64_t dense_limit = std::uint64_t{1} << 16;

    void record(std::uint64_t rank) {
        if (rank < dense_limit) {
            if (rank >= dense_.size()) {
                dense_.resize(std::min<std::uint64_t>(std::bit_ceil(rank + 1), dense_limit), 0);
            }
            ++dense_[rank];
        } else {
            ++sparse_[rank];
        }
        ++total_;
        sum_ += rank;
        max_rank_ = std::max(max_rank_, rank);
    }

    std::uint64_t total_deletes() const noexcept { return total_; }
    std::uint64_t max_rank() const noexcept { return max_rank_; }

    double mean_rank() const noexcept {
        return total_ == 0 ? 0.0 : static_cast<double>(sum_) / static_cast<double>(total_);
    }

    std::uint64_t count_at(std::uint64_t rank) const {
        if (rank < dense_limit) {
            return rank < dense_.size() ? dense_[rank] : 0;
        }
        auto it = sparse_.find(rank);
        return it == sparse_.end() ? 0 : it->second;
    }

    // Number of recorded ranks <= rank.
    std::uint64_t count_at_most(std::uint64_t rank) const {
        std::uint64_t count = 0;
        const std::uint64_t dense_end = std::min<std::uint64_t>(rank + 1, dense_.size());
        for (std::uint64_t r = 0; r < dense_end; ++r) {
            count += dense_[r];
        }
        for (auto const &[r, c] : sparse_) {
            if (r > rank) {
                break;
            }
            count += c;
        }
        return count;
    }

    // Empirical P(rank > k).
    double tail(std::uint64_t k) const {
        assert(total_ > 0);
        return static_cast<double>(total_ - count_at_most(k)) / static_cast<double>(total_);
    }

    // Smallest rank r with at least ceil(q * total) observations <= r.
    // quantile(0) is the minimum, quantile(1) the maximum; monotone in q.
    std::uint64_t quantile(double q) const {
        assert(total_ > 0);
        assert(q >= 0.0 && q <= 1.0);
        const auto raw = static_cast<std::uint64_t>(std::ceil(q * static_cast<double>(total_)));
        const std::uint64_t target = std::clamp<std::uint64_t>(raw, 1, total_);
        std::uint64_t cumulative = 0;
        for (std::uint64_t r = 0; r < dense_.size(); ++r) {
            cumulative += dense_[r];
            if (cumulative >= target) {
                return r;
            }
        }
        for (auto const &[r, c] : sparse_) {
            cumulative += c;
            if (cumulative >= target) {
                return r;
            }
        }
        return max_rank_;
    }

    // Visits (rank, count) pairs in ascending rank order, skipping zeros.
    template <typename Visitor>
    void for_each(Visitor &&visit) const {
        for (std::uint64_t r = 0; r < dense_.size(); ++r) {
            if (dense_[r] != 0) {
                visit(r, dense_[r]);
            }
        }
        for (auto const &[r, c] : sparse_) {
            visit(r, c);
        }
    }

    friend bool operator==(RankErrorStats const &lhs, RankErrorStats const &rhs) {
        if (lhs.total_ != rhs.total_ || lhs.max_rank_ != rhs.max_rank_ || lhs.sum_ != rhs.sum_) {
            return false;
        }
        bool equal = true;
        lhs.for_each([&](std::uint64_t rank, std::uint64_t count) {
            if (rhs.count_at(rank) != count) {
                equal = false;
            }
        });
        return equal;
    }

   private:
    std::vector<std::uint64_t> dense_;
    std::map<std::uint64_t, std::uint64_t> sparse_;
    std::uint64_t total_ = 0;
    std::uint64_t sum_ = 0;
    std::uint64_t max_rank_ = 0;
};

}  // namespace multiqueue
