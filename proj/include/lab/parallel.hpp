#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace ergolab {

// Static split of [0, n) across workers; body(i) must write disjoint slots.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& body) {
    if (workers <= 1 || n < 2048) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t w = static_cast<std::size_t>(workers);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += w) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace ergolab
