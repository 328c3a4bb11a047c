#pragma once

// Seeded substreams for Monte Carlo work.
//
// Every replicate r of an experiment keyed by (seed, stream) gets its own
// engine, seeded from a SplitMix64 hash of the triple. Results therefore do
// not depend on which thread ran which replicate or in what order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace pshrink {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream,
                                             std::uint64_t counter) noexcept {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

/// Standard normal draws from one substream.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
        : engine_(substream_key(seed, stream, counter)) {}

    double operator()() { return normal_(engine_); }

    void fill(std::span<double> out) {
        for (double& v : out) v = normal_(engine_);
    }

    std::vector<double> draw(std::size_t count) {
        std::vector<double> out(count);
        fill(out);
        return out;
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream identifiers, so experiments sharing a seed do not share noise.
namespace streams {
inline constexpr std::uint64_t canonical_risk = 0x01;
inline constexpr std::uint64_t a_beta = 0x02;
inline constexpr std::uint64_t wavelet_noise = 0x03;
inline constexpr std::uint64_t signal_noise = 0x04;
}  // namespace streams

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// body must only write to storage owned by index i.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace pshrink
