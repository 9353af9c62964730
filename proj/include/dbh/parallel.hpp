#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace dbh {

// Global worker budget. Set once from the CLI / bindings; 0 = hardware default.
inline std::atomic<int>& thread_budget() {
    static std::atomic<int> budget{0};
    return budget;
}

inline int worker_count() {
    int b = thread_budget().load();
    if (b > 0) return b;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Runs fn on [begin,end) chunks. Chunk boundaries depend only on n and the
// worker count, and callers that reduce must combine per-chunk results in
// chunk order to stay deterministic.
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(std::size_t(worker_count()), n);
    if (workers <= 1) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t b = w * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&fn, w, b, e] { fn(w, b, e); });
    }
    for (auto& t : pool) t.join();
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    parallel_chunks(n, [&fn](std::size_t, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) fn(i);
    });
}

// Deterministic parallel sum: per-chunk partials combined in chunk order.
template <class T, class F>
T parallel_sum(std::size_t n, T zero, F&& term) {
    std::size_t workers = std::min<std::size_t>(std::size_t(worker_count()), std::max<std::size_t>(n, 1));
    std::vector<T> partial(workers, zero);
    parallel_chunks(n, [&](std::size_t w, std::size_t b, std::size_t e) {
        T acc = zero;
        for (std::size_t i = b; i < e; ++i) acc += term(i);
        partial[w] = acc;
    });
    T total = zero;
    for (const T& p : partial) total += p;
    return total;
}

} // namespace dbh
