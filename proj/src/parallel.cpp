#include "tomocal/parallel.hpp"

#include <atomic>
#include <stdexcept>
#include <thread>
#include <vector>

namespace tomocal::parallel {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
    if (n < 0) throw std::invalid_argument("set_thread_count: negative");
    g_threads.store(n == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : n);
}

int thread_count() {
    const int n = g_threads.load();
    return n < 1 ? 1 : n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int workers = thread_count();
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(workers, n)) - 1;
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
}

}  // namespace tomocal::parallel
