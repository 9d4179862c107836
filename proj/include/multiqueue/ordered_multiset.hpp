#pragma once

#include <boost/multi_index/identity.hpp>
#include <boost/multi_index/ranked_index.hpp>
#include <boost/multi_index_container.hpp>
#include <cstddef>
#include <cstdint>

#include "multiqueue/element.hpp"

namespace multiqueue {

// Ordered multiset with O(log n) rank queries, used as the independent
// reference ("what would an exact priority queue have returned?"). Backed by
// a Boost.MultiIndex ranked index; deliberately shares no code with the
// d-ary heap it judges.
class OrderedMultiset {
   public:
    void insert(key_type key) { keys_.insert(key); }

    // Removes one instance; false if the key is absent.
    bool erase_one(key_type key) {
        auto it = keys_.find(key);
        if (it == keys_.end()) {
            return false;
        }
        keys_.erase(it);
        return true;
    }

    // Number of stored keys strictly smaller than key. The rank error of
    // deleting x from contents S is count_less(x): ties count as rank 0.
    std::uint64_t count_less(key_type key) const {
        return static_cast<std::uint64_t>(keys_.rank(keys_.lower_bound(key)));
    }

    bool contains(key_type key) const { return keys_.find(key) != keys_.end(); }
    std::size_t size() const noexcept { return keys_.size(); }
    bool empty() const noexcept { return keys_.empty(); }
    void clear() noexcept { keys_.clear(); }

   private:
    using Container = boost::multi_index_container<
        key_type,
        boost::multi_index::indexed_by<
            boost::multi_index::ranked_non_unique<boost::multi_index::identity<key_type>>>>;

    Container keys_;
};

}  // namespace multiqueue
