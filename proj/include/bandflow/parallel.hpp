#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

namespace bandflow {

/// Threads to use for `tasks` independent jobs: hardware concurrency, capped by
/// the BANDFLOW_THREADS environment variable when it holds a positive integer,
/// and never more than `tasks`.
std::size_t worker_count(std::size_t tasks);

/// Evaluates fn(0) .. fn(count-1) on a pool of worker_count(count) threads.
/// Results come back in index order. If any call throws, the exception from
/// the lowest failing index is rethrown after all workers finish.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn) {
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = worker_count(count);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<T> out;
    out.reserve(count);
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

} // namespace bandflow
