#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace subwalk {

/// Run fn(chunk_index, begin, end) over [0,total) split into fixed-size
/// chunks. Chunk boundaries depend only on (total, chunk); threads pull
/// chunks from a shared counter, so callers must write results into
/// per-chunk slots and reduce in chunk order to stay deterministic.
inline void for_each_chunk(std::size_t total, std::size_t chunk,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& fn,
                           unsigned threads = 0) {
    if (chunk == 0) chunk = 1;
    const std::size_t n_chunks = (total + chunk - 1) / chunk;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, std::max<std::size_t>(n_chunks, 1)));

    if (threads <= 1 || n_chunks <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk, std::min(total, (c + 1) * chunk));
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                fn(c, c * chunk, std::min(total, (c + 1) * chunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace subwalk
