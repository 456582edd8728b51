#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace sfd::detail {

/// Runs fn(0..count-1) across up to `threads` workers (0 = hardware
/// concurrency). The callable must be safe to run concurrently for distinct
/// indices; results should be written into per-index slots so assembly stays
/// deterministic.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    if (count <= 0) return;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = std::min(threads, count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& worker : pool) worker.join();
}

}  // namespace sfd::detail
