#include "flowembed/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace flowembed::par {

int worker_count(std::size_t jobs) {
    if (jobs <= 1) return 1;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    long cap = static_cast<long>(hw);
    if (const char* env = std::getenv("FLOWEMBED_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed >= 1) cap = std::min(cap, parsed);
    }
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cap), jobs));
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const int workers = worker_count(n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t first_bad = std::numeric_limits<std::size_t>::max();
    std::exception_ptr first_err;

    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < first_bad) {
                    first_bad = i;
                    first_err = std::current_exception();
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (std::thread& t : pool) t.join();

    if (first_err) std::rethrow_exception(first_err);
}

}  // namespace flowembed::par
