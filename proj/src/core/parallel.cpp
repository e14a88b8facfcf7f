#include "core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace vmn {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
    int hw = int(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (n <= 0) n = hw;
    g_threads.store(std::min(n, 256));
}

int thread_count() { return g_threads.load(); }

void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(std::size_t(thread_count()), n);
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace vmn
