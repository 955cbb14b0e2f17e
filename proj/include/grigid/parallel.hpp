#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace grigid {

/// Process-wide parallelism cap. 1 (the default) means fully sequential.
inline std::atomic<int>& thread_cap() {
    static std::atomic<int> cap{1};
    return cap;
}

inline void set_thread_cap(int n) { thread_cap().store(n < 1 ? 1 : n); }

/// Runs fn(begin, end) over a partition of [0, n). Results must be merged
/// order-insensitively by the caller (max, union, ...), which keeps parallel
/// runs bit-identical to sequential ones.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    const int cap = thread_cap().load();
    const unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = static_cast<std::size_t>(cap < 1 ? 1 : cap);
    if (hw > 0 && workers > hw) workers = hw;
    if (workers <= 1 || n < 2 * workers) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = b + chunk < n ? b + chunk : n;
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace grigid
