#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace xofm {

using rng_type = std::mt19937_64;

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Combine a base seed with stream indices (trial, fold, attempt, ...) into one seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> streams) noexcept {
    std::uint64_t s = detail::mix64(base);
    for (const std::uint64_t v : streams) {
        s = detail::mix64(s ^ detail::mix64(v + 0x632be59bd9b4e019ULL));
    }
    return s;
}

}  // namespace xofm
