#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sigfield {

// Runs fn(i) for i in [0, count) across up to `threads` workers.  Work items
// own their output slots, so results are identical for any thread count;
// the first exception is rethrown on the calling thread.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex mtx;
    std::size_t next = 0;
    std::exception_ptr error;
    const int workers = std::min<std::size_t>(threads, count);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t i;
                {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (next >= count || error) return;
                    i = next++;
                }
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mtx);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sigfield
