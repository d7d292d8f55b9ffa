#include "stochbayes/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace stochbayes {

std::size_t thread_cap() {
    std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("STOCHBAYES_THREADS")) {
        try {
            const long requested = std::stol(env);
            cap = requested < 1 ? 1 : std::min<std::size_t>(cap, static_cast<std::size_t>(requested));
        } catch (const std::exception&) {
            // unparsable value: ignore and keep the hardware default
        }
    }
    return cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min(thread_cap(), n == 0 ? std::size_t{1} : n);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
}

} // namespace stochbayes
