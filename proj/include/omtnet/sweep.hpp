#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "omtnet/types.hpp"

namespace omtnet {

inline int default_workers() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Applies fn to every index in [0, count) on `workers` threads. Results are
/// written in index order, so the output is deterministic regardless of
/// scheduling. The first exception wins and is rethrown on the caller.
template <class Result>
std::vector<Result> parallel_map(int count, const std::function<Result(int)>& fn,
                                 int workers = 0) {
    if (workers <= 0) workers = default_workers();
    workers = std::min(workers, std::max(count, 1));
    std::vector<Result> results(static_cast<size_t>(count));
    if (count == 0) return results;
    if (workers == 1) {
        for (int k = 0; k < count; ++k) results[static_cast<size_t>(k)] = fn(k);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            const int k = next.fetch_add(1);
            if (k >= count) return;
            try {
                results[static_cast<size_t>(k)] = fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace omtnet
