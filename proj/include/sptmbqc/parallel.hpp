#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace sptmbqc {

// Global worker count; 0 means hardware_concurrency. The CLI sets this from
// --jobs, tests leave it at the default.
int default_jobs();
void set_default_jobs(int jobs);

// Splits [0, n) into contiguous chunks and runs fn(begin, end, chunk_index)
// on each from a worker thread. Runs inline when n is small or jobs == 1.
inline void parallel_chunks(std::size_t n,
                            const std::function<void(std::size_t, std::size_t, int)>& fn,
                            int jobs = 0) {
    if (jobs <= 0) jobs = default_jobs();
    std::size_t min_chunk = 1024;
    int nthreads = static_cast<int>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, n / min_chunk)));
    if (nthreads <= 1 || n == 0) {
        if (n > 0) fn(0, n, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    std::size_t chunk = (n + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        std::size_t b = t * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e, t] { fn(b, e, t); });
    }
    for (auto& th : pool) th.join();
}

} // namespace sptmbqc
