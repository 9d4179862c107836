#pragma once

#include <cstdint>
#include <limits>

namespace multiqueue {

using key_type = std::uint64_t;
using payload_type = std::uint32_t;

// Reserved key marking an empty local queue. It loses every two-choice
// comparison, so empty queues are never preferred, and a pop that yields it
// signals emptiness. Real elements must never carry it.
inline constexpr key_type sentinel_key = std::numeric_limits<key_type>::max();

struct Element {
    key_type key{};
    payload_type payload{};

    friend bool operator==(Element const &, Element const &) = default;
};

// Ordering is by key only; payloads never participate in comparisons.
struct ElementKeyLess {
    constexpr bool operator()(Element const &lhs, Element const &rhs) const noexcept {
        return lhs.key < rhs.key;
    }
};

}  // namespace multiqueue
