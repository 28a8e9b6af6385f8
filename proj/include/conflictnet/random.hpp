#pragma once

#include <cstdint>
#include <initializer_list>

namespace conflictnet {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for a stream identified by `path` under `master`. Independent of
/// scheduling: the same (master, path) always yields the same seed.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    auto seed = mix64(master);
    for (auto step : path) {
        seed = mix64(seed ^ mix64(step + 0x632be59bd9b4e019ULL));
    }
    return seed;
}

} // namespace conflictnet
