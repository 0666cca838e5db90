#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qfl {

/// Runs fn(i) for i in [0, n) over `threads` workers with a static block
/// partition. fn must only write to slots owned by index i.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::jthread> pool;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
}

}  // namespace qfl
