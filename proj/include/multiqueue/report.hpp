#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "multiqueue/bench.hpp"
#include "multiqueue/rank_stats.hpp"
#include "multiqueue/theory.hpp"

namespace multiqueue {

// CSV row per result: p,c,num_queues,n0,mode,ops,seconds,ops_per_sec,failed_locks
void write_bench_csv(std::ostream &out, std::vector<BenchResult> const &results);
nlohmann::ordered_json bench_json(BenchResult const &result);
nlohmann::ordered_json bench_json(std::vector<BenchResult> const &results);

// Histogram CSV: rank,count (ascending, zero counts skipped).
void write_rank_csv(std::ostream &out, RankErrorStats const &stats);

// Summary with quartiles at 0/25/50/75/100%, mean and total.
nlohmann::ordered_json quality_json(RankErrorStats const &stats);

// Tail table CSV: k,tail for k = 0..k_max.
void write_theory_csv(std::ostream &out, TheoryModel const &model, std::uint64_t k_max);

nlohmann::ordered_json verify_json(VerifyResult const &result);

}  // namespace multiqueue
