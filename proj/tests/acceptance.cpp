// Acceptance sweep: every release criterion in one binary, one PASS/FAIL
// line each. Exit status is 0 iff nothing failed (skips are allowed).
// Usage: acceptance [--only N]
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "multiqueue/bench.hpp"
#include "multiqueue/multi_queue.hpp"
#include "multiqueue/quality.hpp"
#include "multiqueue/theory.hpp"

using namespace multiqueue;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Physical core count from sysfs topology; logical count as the fallback.
unsigned physical_cores() {
    std::set<std::pair<int, int>> cores;
    const unsigned logical = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned cpu = 0; cpu < logical; ++cpu) {
        const std::string base =
            "/sys/devices/system/cpu/cpu" + std::to_string(cpu) + "/topology/";
        std::ifstream package(base + "physical_package_id");
        std::ifstream core(base + "core_id");
        int package_id = -1;
        int core_id = -1;
        if (package >> package_id && core >> core_id) {
            cores.emplace(package_id, core_id);
        }
    }
    return cores.empty() ? logical : static_cast<unsigned>(cores.size());
}

std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.4g", value);
    return buffer;
}

// ---- criterion 1: single-queue degeneration is an exact priority queue ----

Outcome exactness_single_queue() {
    const auto start = std::chrono::steady_clock::now();
    Config config;
    config.num_queues = 1;
    config.expected_prefill = 1 << 16;
    MultiQueue mq(config);
    auto handle = mq.get_handle();
    std::priority_queue<key_type, std::vector<key_type>, std::greater<>> reference;
    Rng rng(314159);
    key_type watermark = 0;
    for (int op = 0; op < 100'000; ++op) {
        if (reference.empty() || rng.bounded(100) < 55) {
            const key_type key = rng.bounded(std::uint64_t{1} << 40);
            handle.push(Element{key, 0});
            reference.push(key);
            watermark = 0;  // a refill may legally lower the next minimum
        } else {
            auto popped = handle.try_pop();
            if (!popped.has_value()) {
                return {Status::fail, "pop signalled empty with elements present"};
            }
            if (popped->key != reference.top()) {
                return {Status::fail, "pop returned " + std::to_string(popped->key) +
                                          ", reference heap says " +
                                          std::to_string(reference.top())};
            }
            reference.pop();
            if (popped->key < watermark) {
                return {Status::fail, "delete sequence decreased without an insert between"};
            }
            watermark = popped->key;
        }
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 5.0) {
        return {Status::fail, "took " + fmt(elapsed) + "s, limit is 5s"};
    }
    return {Status::pass, "100000 mixed ops match a reference binary heap"};
}

// ---- criterion 2: conservation under concurrency ----

Outcome conservation_concurrent() {
    const auto start = std::chrono::steady_clock::now();
    Config config;
    config.threads_hint = 8;
    config.queue_factor = 2.0;
    config.expected_prefill = 100'000;
    WorkloadSpec workload;
    workload.threads = 8;
    workload.prefill = 100'000;
    workload.op_count = 1'000'000;
    workload.key_max = 100'000'000;
    const VerifyResult result = run_verify(config, workload);
    if (!result.ok) {
        return {Status::fail, result.detail};
    }
    const double elapsed = seconds_since(start);
    if (elapsed >= 30.0) {
        return {Status::fail, "took " + fmt(elapsed) + "s, limit is 30s"};
    }
    std::ostringstream detail;
    detail << "inserted=" << result.inserted << " deleted=" << result.deleted
           << " drained=" << result.drained << ", multisets match";
    return {Status::pass, detail.str()};
}

// ---- criteria 3-5 share three long quality simulations ----

struct QualityRun {
    double c;
    int p;
    RankErrorStats stats;
};

class QualityCache {
   public:
    RankErrorStats const &get(double c, int p) {
        for (auto const &run : runs_) {
            if (run.c == c && run.p == p) {
                return run.stats;
            }
        }
        Config config;
        config.threads_hint = p;
        config.queue_factor = c;
        config.expected_prefill = 1'000'000;
        WorkloadSpec workload;
        workload.prefill = 1'000'000;
        workload.key_max = 100'000'000;
        std::fprintf(stderr, "      [quality sim c=%g p=%d: 10^6 prefill + 10^7 ops]\n", c, p);
        runs_.push_back(QualityRun{c, p, simulate_quality(config, workload, 10'000'000)});
        return runs_.back().stats;
    }

   private:
    std::vector<QualityRun> runs_;
};

Outcome quartile_bands(QualityCache &cache) {
    struct Band {
        double c;
        int p;
        std::uint64_t lo25, hi25, lo50, hi50, lo75, hi75, max_limit;
    };
    const std::vector<Band> bands{
        {2.0, 56, 10, 25, 30, 65, 75, 160, 10'000},
        {4.0, 56, 20, 50, 60, 130, 150, 320, 20'000},
    };
    std::ostringstream detail;
    for (auto const &band : bands) {
        RankErrorStats const &stats = cache.get(band.c, band.p);
        const std::uint64_t q25 = stats.quantile(0.25);
        const std::uint64_t q50 = stats.quantile(0.50);
        const std::uint64_t q75 = stats.quantile(0.75);
        const std::uint64_t top = stats.max_rank();
        detail << "c=" << band.c << ": 25/50/75%=" << q25 << "/" << q50 << "/" << q75
               << " max=" << top << "  ";
        if (q25 < band.lo25 || q25 > band.hi25) {
            return {Status::fail, detail.str() + "(25% outside [" + std::to_string(band.lo25) +
                                      "," + std::to_string(band.hi25) + "])"};
        }
        if (q50 < band.lo50 || q50 > band.hi50) {
            return {Status::fail, detail.str() + "(50% outside [" + std::to_string(band.lo50) +
                                      "," + std::to_string(band.hi50) + "])"};
        }
        if (q75 < band.lo75 || q75 > band.hi75) {
            return {Status::fail, detail.str() + "(75% outside [" + std::to_string(band.lo75) +
                                      "," + std::to_string(band.hi75) + "])"};
        }
        if (top >= band.max_limit) {
            return {Status::fail,
                    detail.str() + "(max >= " + std::to_string(band.max_limit) + ")"};
        }
    }
    return {Status::pass, detail.str()};
}

Outcome small_k_tail(QualityCache &cache) {
    RankErrorStats const &stats = cache.get(2.0, 56);
    const TheoryModel model(2.0, 56);
    double worst = 0.0;
    std::uint64_t worst_k = 0;
    for (std::uint64_t k = 0; k <= 112; ++k) {
        const double gap = std::fabs(stats.tail(k) - model.tail(k));
        if (gap > worst) {
            worst = gap;
            worst_k = k;
        }
    }
    std::ostringstream detail;
    detail << "max |empirical - (1-1/56)^k| = " << fmt(worst) << " at k=" << worst_k
           << " (limit 0.05, k <= 112)";
    return {worst <= 0.05 ? Status::pass : Status::fail, detail.str()};
}

Outcome mean_bound(QualityCache &cache) {
    std::ostringstream detail;
    for (auto const &[c, p] : std::vector<std::pair<double, int>>{{2.0, 56}, {4.0, 56}, {2.0, 256}}) {
        const double mean = cache.get(c, p).mean_rank();
        const double bound = c * p / 2.0;
        detail << "c=" << c << ",p=" << p << ": mean=" << fmt(mean) << " vs " << fmt(bound)
               << "  ";
        if (mean < bound / 2.0 || mean > bound * 2.0) {
            return {Status::fail, detail.str() + "(outside factor 2)"};
        }
    }
    return {Status::pass, detail.str()};
}

// ---- criterion 6: lock attempts per operation ----

Outcome lock_attempts() {
    const int p = static_cast<int>(physical_cores());
    Config config;
    config.threads_hint = p;
    config.queue_factor = 2.0;
    config.expected_prefill = 1'000'000;
    WorkloadSpec workload;
    workload.threads = p;
    workload.prefill = 1'000'000;
    workload.duration_ms = 1000;
    workload.key_max = 100'000'000;
    const BenchResult result = run_throughput(config, workload);
    const double attempts = result.stats.mean_lock_attempts_per_op();
    std::ostringstream detail;
    detail << "p=" << p << " physical cores: " << fmt(attempts)
           << " lock attempts per completed op (limit 3)";
    return {attempts <= 3.0 ? Status::pass : Status::fail, detail.str()};
}

// ---- criterion 7: monotonic liveness + conservation ----

Outcome monotonic_liveness() {
    Config config;
    config.threads_hint = 4;
    config.queue_factor = 2.0;
    config.expected_prefill = 10'000;
    WorkloadSpec workload;
    workload.mode = WorkloadMode::monotonic;
    workload.threads = 4;
    workload.prefill = 10'000;
    workload.duration_ms = 1000;
    workload.key_max = 100'000'000;
    const VerifyResult result = run_verify(config, workload);
    if (!result.ok) {
        return {Status::fail, result.detail};
    }
    std::ostringstream detail;
    detail << "completed " << result.bench.total_ops
           << " monotonic ops in 1 s, conservation holds";
    return {Status::pass, detail.str()};
}

// ---- criterion 8: scaling smoke, hardware permitting ----

Outcome scaling_smoke() {
    const unsigned logical = std::max(1u, std::thread::hardware_concurrency());
    if (logical < 4) {
        return {Status::skip,
                "host has " + std::to_string(logical) + " logical core(s), needs >= 4"};
    }
    auto run = [](int p) {
        Config config;
        config.threads_hint = p;
        config.expected_prefill = 1'000'000;
        WorkloadSpec workload;
        workload.threads = p;
        workload.prefill = 1'000'000;
        workload.duration_ms = 1000;
        workload.key_max = 100'000'000;
        return run_throughput(config, workload).ops_per_sec;
    };
    const double one = run(1);
    const double four = run(4);
    std::ostringstream detail;
    detail << "ops/s p=1: " << fmt(one) << ", p=4: " << fmt(four);
    return {four > one ? Status::pass : Status::fail, detail.str()};
}

// ---- criterion 9: closed-form model sanity ----

Outcome theory_exactness() {
    std::ostringstream detail;
    for (unsigned p : {56u, 256u}) {
        const TheoryModel model(2.0, p);
        // Partial pmf sums closed by the geometric tail must give exactly 1.
        for (std::uint64_t support : {std::uint64_t{1}, std::uint64_t{100}, std::uint64_t{100'000}}) {
            double sum = 0.0;
            for (std::uint64_t i = 1; i <= support; ++i) {
                sum += model.rank_pmf(i);
            }
            const double closure = sum + model.tail(support);
            if (std::fabs(closure - 1.0) > 1e-9) {
                return {Status::fail, "pmf sum over support " + std::to_string(support) +
                                          " closes to " + fmt(closure) + " for p=" +
                                          std::to_string(p)};
            }
        }
        const double at_threshold = std::pow(1.0 - model.q2(), model.tail_threshold());
        const double target = 1.0 / static_cast<double>(p);
        detail << "p=" << p << ": tail(threshold)=" << fmt(at_threshold) << " vs p^-1="
               << fmt(target) << "  ";
        if (std::fabs(at_threshold - target) > 0.05 * target) {
            return {Status::fail, detail.str() + "(off by more than 5%)"};
        }
    }
    return {Status::pass, detail.str() + "; pmf closure exact to 1e-9"};
}

}  // namespace

int main(int argc, char **argv) {
    int only = 0;
    if (argc == 3 && std::strcmp(argv[1], "--only") == 0) {
        only = std::atoi(argv[2]);
    } else if (argc != 1) {
        std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
        return 2;
    }

    QualityCache cache;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"single-queue case is an exact priority queue", exactness_single_queue},
        {"concurrent run conserves every element", conservation_concurrent},
        {"rank-error quartiles inside the reference bands", [&] { return quartile_bands(cache); }},
        {"empirical small-k tail tracks the geometric model", [&] { return small_k_tail(cache); }},
        {"mean rank error within factor 2 of c*p/2", [&] { return mean_bound(cache); }},
        {"mean lock attempts per op at most 3", lock_attempts},
        {"monotonic workload stays live and conserving", monotonic_liveness},
        {"throughput scales from 1 to 4 threads", scaling_smoke},
        {"closed-form model: pmf closure and threshold", theory_exactness},
    };

    bool failed = false;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (only != 0 && number != only) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (std::exception const &error) {
            outcome = {Status::fail, std::string("exception: ") + error.what()};
        }
        const char *label = outcome.status == Status::pass ? "PASS"
                            : outcome.status == Status::fail ? "FAIL"
                                                             : "SKIP";
        failed = failed || outcome.status == Status::fail;
        std::printf("%s  C%d %s  [%s] (%.1fs)\n", label, number, criteria[i].first.c_str(),
                    outcome.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
