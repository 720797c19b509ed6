#include "mono2d/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mono2d {

int worker_count() {
    static const int cached = [] {
        int n = static_cast<int>(std::thread::hardware_concurrency());
        if (n < 1) n = 1;
        if (const char* env = std::getenv("MONO2D_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v >= 1) n = std::min<long>(v, 256);
        }
        return n;
    }();
    return cached;
}

namespace {
thread_local bool inside_parallel_region = false;
} // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const int workers = worker_count();
    if (n == 0) return;
    // Nested regions run serially so worker counts stay bounded.
    if (workers == 1 || n == 1 || inside_parallel_region) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        inside_parallel_region = true;
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            fn(i);
        }
        inside_parallel_region = false;
    };
    std::vector<std::thread> pool;
    const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    pool.reserve(spawn - 1);
    for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

} // namespace mono2d
