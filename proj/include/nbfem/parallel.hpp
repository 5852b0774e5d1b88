#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace nbfem {

// Default worker count: NBFEM_THREADS if set, otherwise the hardware count
// capped at 8. Results never depend on this value; only wall time does.
inline int default_thread_count() {
    if (const char* env = std::getenv("NBFEM_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp<unsigned>(hw == 0 ? 1 : hw, 1, 8));
}

// Runs fn(begin, end) on contiguous index chunks. Callers that need
// deterministic output must write to per-index slots and reduce in index
// order afterwards.
inline void parallel_for_chunks(std::int64_t n, int threads,
                                const std::function<void(std::int64_t, std::int64_t)>& fn) {
    if (n <= 0) return;
    threads = std::max(1, threads);
    if (threads == 1 || n < 128) {
        fn(0, n);
        return;
    }
    const std::int64_t nchunks = std::min<std::int64_t>(threads, n);
    const std::int64_t chunk = (n + nchunks - 1) / nchunks;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nchunks));
    for (std::int64_t c = 0; c < nchunks; ++c) {
        const std::int64_t b = c * chunk;
        const std::int64_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace nbfem
