#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace lpk::par {

/// Worker count: LPK_THREADS caps (or forces) it, otherwise the hardware
/// concurrency is used.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("LPK_THREADS")) {
        const long requested = std::strtol(env, nullptr, 10);
        if (requested >= 1) return static_cast<unsigned>(requested);
    }
    return hw;
}

/// Runs fn(block_index, first_item, last_item) over fixed-size blocks of
/// [0, n_items) and returns the per-block results indexed by block.  Blocks
/// are claimed dynamically but each result lands in its own slot, so the
/// caller's in-order reduction is identical for every worker count.
template <typename Partial, typename BlockFn>
std::vector<Partial> map_blocks(std::uint64_t n_items, std::uint64_t block_size, BlockFn fn) {
    const std::uint64_t n_blocks = (n_items + block_size - 1) / block_size;
    std::vector<Partial> partials(n_blocks);
    const unsigned workers = std::min<std::uint64_t>(worker_count(), n_blocks ? n_blocks : 1);
    if (workers <= 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) {
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            partials[b] = fn(b, lo, hi);
        }
        return partials;
    }
    std::atomic<std::uint64_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= n_blocks) return;
            const std::uint64_t lo = b * block_size;
            const std::uint64_t hi = std::min(n_items, lo + block_size);
            partials[b] = fn(b, lo, hi);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return partials;
}

} // namespace lpk::par
