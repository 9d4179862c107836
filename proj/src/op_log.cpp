#include "multiqueue/op_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace multiqueue {

namespace {

[[noreturn]] void malformed(std::string_view line, char const *why) {
    throw std::runtime_error("malformed op log record (" + std::string(why) + "): " +
                             std::string(line));
}

// Parses one unsigned field up to the next comma (or end of line for the
// last field) and advances the cursor past the comma.
template <typename Int>
Int parse_field(std::string_view line, std::string_view &rest, bool last) {
    const std::size_t comma = rest.find(',');
    if (last != (comma == std::string_view::npos)) {
        malformed(line, "wrong field count");
    }
    const std::string_view field = last ? rest : rest.substr(0, comma);
    Int value{};
    auto [end, err] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (err != std::errc{} || end != field.data() + field.size() || field.empty()) {
        malformed(line, "bad integer field");
    }
    rest = last ? std::string_view{} : rest.substr(comma + 1);
    return value;
}

}  // namespace

std::string format_op_log_record(OpLogRecord const &record) {
    std::string out;
    out.reserve(48);
    out += std::to_string(record.timestamp);
    out += ',';
    out += std::to_string(record.thread);
    out += ',';
    out += static_cast<char>(record.kind);
    out += ',';
    out += std::to_string(record.key);
    out += ',';
    out += std::to_string(record.payload);
    return out;
}

OpLogRecord parse_op_log_record(std::string_view line) {
    OpLogRecord record;
    std::string_view rest = line;
    record.timestamp = parse_field<std::uint64_t>(line, rest, false);
    record.thread = parse_field<std::uint32_t>(line, rest, false);
    const std::size_t comma = rest.find(',');
    if (comma != 1) {
        malformed(line, "kind must be a single character");
    }
    const char kind = rest.front();
    if (kind != 'I' && kind != 'D') {
        malformed(line, "kind must be I or D");
    }
    record.kind = static_cast<OpKind>(kind);
    rest = rest.substr(2);
    record.key = parse_field<key_type>(line, rest, false);
    record.payload = parse_field<payload_type>(line, rest, true);
    return record;
}

void write_op_log(std::ostream &out, std::vector<OpLogRecord> const &records) {
    for (auto const &record : records) {
        out << format_op_log_record(record) << '\n';
    }
}

std::vector<OpLogRecord> read_op_log(std::istream &in) {
    std::vector<OpLogRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        records.push_back(parse_op_log_record(line));
    }
    return records;
}

std::vector<OpLogRecord> read_op_log_file(std::string const &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open op log: " + path);
    }
    return read_op_log(in);
}

void write_op_log_file(std::string const &path, std::vector<OpLogRecord> const &records) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write op log: " + path);
    }
    write_op_log(out, records);
    if (!out.flush()) {
        throw std::runtime_error("failed writing op log: " + path);
    }
}

void sort_op_log(std::vector<OpLogRecord> &records) {
    std::stable_sort(records.begin(), records.end(),
                     [](OpLogRecord const &lhs, OpLogRecord const &rhs) {
                         if (lhs.timestamp != rhs.timestamp) {
                             return lhs.timestamp < rhs.timestamp;
                         }
                         // Inserts first on equal ticks.
                         if (lhs.kind != rhs.kind) {
                             return lhs.kind == OpKind::insert;
                         }
                         return lhs.thread < rhs.thread;
                     });
}

std::vector<OpLogRecord> OpLogRecorder::merged() const {
    std::vector<OpLogRecord> all;
    std::size_t total = 0;
    for (auto const &slot : slots_) {
        total += slot.records_.size();
    }
    all.reserve(total);
    for (auto const &slot : slots_) {
        all.insert(all.end(), slot.records_.begin(), slot.records_.end());
    }
    sort_op_log(all);
    return all;
}

}  // namespace multiqueue
