#include "gvlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace gvlab {

namespace {
std::atomic<int> g_max_threads{2};
}

void set_max_threads(int n) { g_max_threads.store(n < 1 ? 1 : n); }
int max_threads() { return g_max_threads.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    int workers = std::min<std::size_t>(g_max_threads.load(), n);
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace gvlab
