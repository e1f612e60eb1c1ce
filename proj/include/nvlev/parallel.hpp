// parallel.hpp — index-space worker pool for embarrassingly parallel sweeps

#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "nvlev/types.hpp"

namespace nvlev {

// Runs fn(i) for i in [0, n). Work items must be independent; results are
// written by index so output ordering never depends on completion order.
inline void parallel_for_index(Index n, int jobs, const std::function<void(Index)>& fn) {
    if (n <= 0) return;
    if (jobs <= 1 || n == 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<Index>(jobs, n));
    std::atomic<Index> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const Index i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n);  // stop handing out work
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nvlev
