// Minimal deterministic thread pool helpers.
//
// Work is split into fixed blocks by index, never by thread id, so the
// set of per-block results is independent of the worker count; callers
// that reduce must merge blocks in index order.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ccs {

inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) {
    thread_count_ref().store(n < 1 ? 1 : n);
}

inline int thread_count() { return thread_count_ref().load(); }

// Runs fn(i) for i in [begin, end). Blocks are contiguous index ranges;
// fn must not touch state shared across indices.
inline void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                         const std::function<void(std::ptrdiff_t)>& fn) {
    const std::ptrdiff_t n = end - begin;
    if (n <= 0) return;
    const int workers = static_cast<int>(std::min<std::ptrdiff_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::ptrdiff_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<std::ptrdiff_t> next{begin};
    const std::ptrdiff_t chunk = std::max<std::ptrdiff_t>(1, n / (4 * static_cast<std::ptrdiff_t>(workers)));
    std::exception_ptr error;
    std::mutex error_mtx;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            try {
                for (;;) {
                    std::ptrdiff_t lo = next.fetch_add(chunk);
                    if (lo >= end) break;
                    std::ptrdiff_t hi = std::min(lo + chunk, end);
                    for (std::ptrdiff_t i = lo; i < hi; ++i) fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> g(error_mtx);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ccs
