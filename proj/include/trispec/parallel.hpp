#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace trispec {

/// Index-parallel loop; results must be written to pre-sized slots so output
/// assembly stays deterministic regardless of scheduling.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(err);
}

}  // namespace trispec
