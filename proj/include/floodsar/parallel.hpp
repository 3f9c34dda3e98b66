#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace floodsar {

// Runs f(i) for i in [begin, end) split into contiguous chunks, one thread per
// chunk. Callers only write disjoint state per index, so results do not depend
// on the worker count.
template <typename Fn>
void parallel_for(int64_t begin, int64_t end, int jobs, Fn&& f) {
    int64_t n = end - begin;
    if (n <= 0) return;
    int workers = std::max(1, jobs);
    if (workers == 1 || n == 1) {
        for (int64_t i = begin; i < end; ++i) f(i);
        return;
    }
    workers = int(std::min<int64_t>(workers, n));
    int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> threads;
    threads.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) {
        int64_t lo = begin + w * chunk;
        int64_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &f] {
            for (int64_t i = lo; i < hi; ++i) f(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace floodsar
