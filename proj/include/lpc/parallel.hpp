#ifndef LPC_PARALLEL_HPP
#define LPC_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

/**
 * @file parallel.hpp
 * @brief Static-partition parallel loop.
 *
 * Tasks write into pre-sized, index-addressed slots and any reduction happens
 * afterwards in index order, so results never depend on the worker count.
 */

namespace lpc {

/**
 * Run `fun(i)` for every `i` in `[0, n)` using up to `num_threads` workers.
 * The first exception thrown by any task is rethrown on the calling thread.
 */
template<class Function>
void parallel_for(std::size_t n, int num_threads, Function fun) {
    std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(num_threads, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fun(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t start = w * chunk, end = std::min(n, start + chunk);
        pool.emplace_back([&, w, start, end]() {
            try {
                for (std::size_t i = start; i < end; ++i) {
                    fun(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}

#endif
