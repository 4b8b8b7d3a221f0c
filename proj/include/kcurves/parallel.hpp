#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace kcurves {

/// Number of workers: $KCURVES_WORKERS if set and positive, otherwise the hardware concurrency.
inline std::size_t worker_count() {
    if (const char* env = std::getenv("KCURVES_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

namespace detail {
inline thread_local bool inside_parallel_region = false;
}

/// Runs fn(i) for every i in [begin, end). Each index is handed to exactly one worker,
/// so results written to per-index slots do not depend on the schedule.
/// The first exception thrown by any task is rethrown on the calling thread.
/// Nested calls from inside a worker run serially.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn, std::size_t workers = worker_count()) {
    if (end <= begin) return;
    if (detail::inside_parallel_region) workers = 1;
    workers = std::min(workers, end - begin);
    if (workers <= 1) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        detail::inside_parallel_region = true;
        struct Reset {
            ~Reset() { detail::inside_parallel_region = false; }
        } reset;
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= end) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(end);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace kcurves
