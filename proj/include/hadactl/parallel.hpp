#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hadactl {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> n{1};
    return n;
}
}  // namespace detail

/// Worker count used by assembly loops; 0 means hardware concurrency.
inline void set_num_threads(int n) { detail::thread_setting() = std::max(0, n); }

inline int num_threads() {
    const int n = detail::thread_setting();
    if (n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count). Each index writes its own output slot, so
/// results do not depend on the number of threads or on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hadactl
