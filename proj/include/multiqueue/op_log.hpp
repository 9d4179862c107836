#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "multiqueue/element.hpp"

namespace multiqueue {

enum class OpKind : char { insert = 'I', remove = 'D' };

// One logged operation. File format: `timestamp,thread,kind,key,payload`,
// one record per line, kind I or D. Blank lines and lines starting with '#'
// are ignored on input.
struct OpLogRecord {
    std::uint64_t timestamp{};
    std::uint32_t thread{};
    OpKind kind{OpKind::insert};
    key_type key{};
    payload_type payload{};

    friend bool operator==(OpLogRecord const &, OpLogRecord const &) = default;
};

// Process-wide monotonic tick (nanoseconds). Comparable across threads of
// one process on one socket; cross-socket clock skew is why replay refuses
// multi-socket logs by default.
inline std::uint64_t monotonic_tick() {
    return static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count());
}

std::string format_op_log_record(OpLogRecord const &record);
OpLogRecord parse_op_log_record(std::string_view line);  // throws on malformed input

void write_op_log(std::ostream &out, std::vector<OpLogRecord> const &records);
std::vector<OpLogRecord> read_op_log(std::istream &in);
std::vector<OpLogRecord> read_op_log_file(std::string const &path);
void write_op_log_file(std::string const &path, std::vector<OpLogRecord> const &records);

// Global replay order: (timestamp, inserts before deletes, thread). The
// kind tie-break keeps an insert/delete pair on the same tick causally safe.
void sort_op_log(std::vector<OpLogRecord> &records);

// Concurrent-safe recording: each thread appends to its own slot, merged
// after the run has quiesced.
class OpLogRecorder {
   public:
    class Slot {
       public:
        void record(OpKind kind, std::uint64_t timestamp, Element element) {
            records_.push_back(OpLogRecord{timestamp, thread_, kind, element.key, element.payload});
        }
        void reserve(std::size_t n) { records_.reserve(n); }

       private:
        friend class OpLogRecorder;
        std::uint32_t thread_ = 0;
        std::vector<OpLogRecord> records_;
    };

    explicit OpLogRecorder(std::size_t threads) : slots_(threads) {
        for (std::size_t i = 0; i < threads; ++i) {
            slots_[i].thread_ = static_cast<std::uint32_t>(i);
        }
    }

    Slot &slot(std::size_t thread) { return slots_.at(thread); }

    // Sorted union of all slots; call only after the recording threads have
    // finished.
    std::vector<OpLogRecord> merged() const;

   private:
    std::vector<Slot> slots_;
};

}  // namespace multiqueue
