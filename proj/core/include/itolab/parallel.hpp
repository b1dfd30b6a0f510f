#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace itolab {

// Worker count from ITOLAB_THREADS; unset, empty, unparsable, or 0 means
// std::thread::hardware_concurrency(). Read on every call.
std::size_t worker_count();

// Runs body(i) for i in [0, n) over contiguous index blocks, one block per
// worker. Bodies must write only to per-index state. If any body throws, the
// exception of the smallest failing index is rethrown after all workers join,
// so the outcome does not depend on the worker count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    if (n == 0) {
        return;
    }
    std::size_t workers = worker_count();
    if (workers > n) {
        workers = n;
    }
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    struct Failure {
        std::size_t index = static_cast<std::size_t>(-1);
        std::exception_ptr error;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = begin + chunk < n ? begin + chunk : n;
        threads.emplace_back([&, w, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    failures[w] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    const Failure* first = nullptr;
    for (const auto& f : failures) {
        if (f.error && (first == nullptr || f.index < first->index)) {
            first = &f;
        }
    }
    if (first != nullptr) {
        std::rethrow_exception(first->error);
    }
}

// Buffers fn(i) for every i in index order.
template <class Fn>
auto parallel_map(std::size_t n, Fn&& fn) {
    using Result = decltype(fn(std::size_t{0}));
    std::vector<Result> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
    return out;
}

} // namespace itolab
