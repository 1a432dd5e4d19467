#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gconj::parallel {

inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> n{1};
    return n;
}

/// Global worker count for for_range. Values < 1 clamp to 1.
inline void set_threads(int n) { thread_count_slot().store(std::max(1, n)); }

inline int threads() { return thread_count_slot().load(); }

inline bool& inside_worker() {
    thread_local bool flag = false;
    return flag;
}

/// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, one per
/// worker, so each index is computed exactly once by exactly one thread.
/// Results must be written to disjoint slots indexed by i; with that
/// discipline the output is bit-identical for any thread count. Nested calls
/// run serially instead of spawning more threads. The first exception thrown
/// by any worker is rethrown on the calling thread.
template <class Fn>
void for_range(std::size_t n, Fn&& fn) {
    const int t = inside_worker()
                      ? 1
                      : static_cast<int>(std::min<std::size_t>(
                            static_cast<std::size_t>(threads()), n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto run_block = [&](std::size_t lo, std::size_t hi) {
        inside_worker() = true;
        try {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        std::size_t lo = n * static_cast<std::size_t>(w) / static_cast<std::size_t>(t);
        std::size_t hi = n * (static_cast<std::size_t>(w) + 1) / static_cast<std::size_t>(t);
        workers.emplace_back(run_block, lo, hi);
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gconj::parallel
