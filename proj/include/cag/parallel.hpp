#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cag {

// Runs fn(i) for i in [0, n) on at most `fan_out` threads. Intended for
// provider-bound work; results must be written to per-index slots. The
// first exception thrown by any fn is rethrown after all workers stop.
template <typename Fn>
void bounded_for(std::size_t n, std::size_t fan_out, Fn&& fn) {
    const std::size_t workers = std::min(n, std::max<std::size_t>(1, fan_out));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard<std::mutex> g(error_mu);
                        if (!first_error) first_error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cag
