#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace multiqueue {

// Closed-form model of two-choice deletion quality under uniform random
// queue contents. With c*p queues, the probability that a given queue holds
// none of the i-1 globally smallest elements factors into a geometric law
// with success probability q2 = 2/(c*p):
//
//   P(rank = i) = (1 - q2)^(i-1) * q2          (i >= 1)
//   P(rank > k) = (1 - q2)^k
//   E[rank]    <= c*p/2
//
// The tail drops below p^-a at k = (c*a/2) * p * ln p.
class TheoryModel {
   public:
    TheoryModel(double c, unsigned p) : c_(c), p_(p) {
        if (!(c > 0.0) || p < 1) {
            throw std::invalid_argument("TheoryModel: c must be positive and p at least 1");
        }
        if (c * static_cast<double>(p) < 2.0) {
            throw std::invalid_argument("TheoryModel: requires c*p >= 2 (q2 must not exceed 1)");
        }
    }

    double c() const noexcept { return c_; }
    unsigned p() const noexcept { return p_; }

    double q2() const noexcept { return 2.0 / (c_ * static_cast<double>(p_)); }

    // P(rank = i), i >= 1.
    double rank_pmf(std::uint64_t i) const {
        if (i < 1) {
            throw std::invalid_argument("TheoryModel: rank_pmf is defined for i >= 1");
        }
        const double q = q2();
        return std::pow(1.0 - q, static_cast<double>(i - 1)) * q;
    }

    double expected_rank() const noexcept { return c_ * static_cast<double>(p_) / 2.0; }

    // P(rank > k).
    double tail(std::uint64_t k) const noexcept {
        return std::pow(1.0 - q2(), static_cast<double>(k));
    }

    // Rank beyond which the tail falls below p^-a.
    double tail_threshold(double a = 1.0) const noexcept {
        return (c_ * a / 2.0) * static_cast<double>(p_) * std::log(static_cast<double>(p_));
    }

   private:
    double c_;
    unsigned p_;
};

}  // namespace multiqueue
