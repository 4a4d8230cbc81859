#pragma once

#include <atomic>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace lifeline {

// Process-wide worker count for parallel evaluation loops.  Results are
// always combined by deterministic index-ordered reduction, so the setting
// affects speed only, never output.
inline std::atomic<int>& thread_count_ref() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) { thread_count_ref().store(n < 1 ? 1 : n); }
inline int thread_count() { return thread_count_ref().load(); }

// Runs fn(i) for i in [0, n) on up to thread_count() workers.  Tasks are
// handed out by atomic counter; any exception is rethrown on the caller
// thread after all workers join.
inline void run_indexed(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(thread_count(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace lifeline
