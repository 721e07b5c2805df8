#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sdcexp::detail {

inline int resolve_threads(int requested, int n_items) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    int t = requested > 0 ? requested : hw;
    if (t > n_items) t = n_items;
    return t < 1 ? 1 : t;
}

// Runs f(i) for i in [0, n). Work items must write results only to their own
// index so the outcome is independent of scheduling.
template <class F>
void parallel_for(int n, int threads, F&& f) {
    threads = resolve_threads(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sdcexp::detail
