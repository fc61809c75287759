#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sans {

// Runs fn(worker, begin, end) over [0, n) in dynamically scheduled chunks.
// Workers must write only to disjoint, position-addressed output slots so the
// result does not depend on scheduling. The first exception thrown by any
// worker is rethrown on the caller thread.
inline void parallel_for_chunks(
    uint64_t n, int threads, uint64_t chunk,
    const std::function<void(int worker, uint64_t begin, uint64_t end)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n <= chunk) {
        fn(0, 0, n);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto work = [&](int worker) {
        for (;;) {
            uint64_t begin = next.fetch_add(chunk);
            if (begin >= n || failed.load(std::memory_order_relaxed)) return;
            uint64_t end = std::min(begin + chunk, n);
            try {
                fn(worker, begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sans
