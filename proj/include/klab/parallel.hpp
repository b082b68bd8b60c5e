#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "klab/random.hpp"

namespace klab {

/// How Monte Carlo work is split. The chunk layout depends only on the budget and
/// chunk size, never on the worker count, so results are identical for any `workers`.
struct ExecPolicy {
    int workers = 1;
    std::uint64_t chunk_size = 4096;
};

/// Default worker count: KESTEN_LAB_WORKERS if set, else 1.
int default_workers();

/// Calls fn(rng, chunk_index, count) for every chunk of `total` items and returns
/// the per-chunk results in chunk order. Chunk i draws from stream.rng(i).
template <class Result, class Fn>
std::vector<Result> map_chunks(std::uint64_t total, const RandomStream& stream,
                               const ExecPolicy& exec, Fn&& fn) {
    const std::uint64_t size = std::max<std::uint64_t>(1, exec.chunk_size);
    const std::uint64_t chunks = (total + size - 1) / size;
    std::vector<Result> results(chunks);
    auto run_one = [&](std::uint64_t c) {
        const std::uint64_t count = std::min(size, total - c * size);
        Rng rng = stream.rng(c);
        results[c] = fn(rng, c, count);
    };
    const int workers = std::max(1, exec.workers);
    if (workers == 1 || chunks <= 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) run_one(c);
        return results;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                run_one(c);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(chunks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const auto nthreads = static_cast<std::uint64_t>(workers) < chunks ? workers : static_cast<int>(chunks);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return results;
}

/// Folds chunk tallies left to right (fixed order keeps sums bit-reproducible).
template <class Tally, class Fn>
Tally reduce_chunks(std::uint64_t total, const RandomStream& stream, const ExecPolicy& exec,
                    Fn&& fn) {
    auto parts = map_chunks<Tally>(total, stream, exec, std::forward<Fn>(fn));
    Tally out{};
    for (const auto& p : parts) out.merge(p);
    return out;
}

/// Running sums of importance weights w * 1{event}. Crude Monte Carlo is the w = 1 case.
struct WeightTally {
    std::uint64_t paths = 0;
    std::uint64_t hits = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double weighted_indicator) {
        ++paths;
        if (weighted_indicator != 0.0) {
            ++hits;
            sum += weighted_indicator;
            sum_sq += weighted_indicator * weighted_indicator;
        }
    }
    void merge(const WeightTally& o) {
        paths += o.paths;
        hits += o.hits;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return paths ? sum / static_cast<double>(paths) : 0.0; }
    double stderr_of_mean() const {
        if (paths < 2) return 0.0;
        const double n = static_cast<double>(paths);
        const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
        return std::sqrt(var / n);
    }
    /// Kish effective sample size of the weighted hits.
    double effective_size() const { return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0; }
};

}  // namespace klab
