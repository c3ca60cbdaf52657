#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace echo_rmt {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/*
 * Counter-based stream derivation.
 *
 * Work unit `index` of a campaign seeded with `master_seed` gets an engine
 * seeded from the four words
 *
 *     k_j = splitmix64(splitmix64(master_seed ^ salt) + 4 * index + j),  j = 0..3
 *
 * The stream depends only on (master_seed, salt, index), never on which
 * worker runs the unit or in which order units are scheduled.
 */
inline Engine derive_stream(std::uint64_t master_seed, std::uint64_t index, std::uint64_t salt = 0)
{
    const std::uint64_t key = splitmix64(master_seed ^ salt);
    std::uint32_t words[8];
    for (std::uint64_t j = 0; j < 4; ++j) {
        const std::uint64_t w = splitmix64(key + 4 * index + j);
        words[2 * j] = static_cast<std::uint32_t>(w);
        words[2 * j + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return Engine(seq);
}

/// Worker count from ECHO_RMT_WORKERS, falling back to the hardware count.
inline unsigned default_worker_count()
{
    if (const char* env = std::getenv("ECHO_RMT_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/*
 * Runs body(k) for k in [0, count) on up to `workers` threads. Work units are
 * handed out dynamically; callers write results into slot k of a preallocated
 * buffer and reduce in index order afterwards, which keeps results independent
 * of the worker count. The first exception thrown by any unit is rethrown.
 */
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            body(k);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) {
                return;
            }
            try {
                body(k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace echo_rmt
