#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

// Platform-stable randomness. The engine is fully specified by the standard;
// the distributions below replace the implementation-defined std:: ones so
// that generated files are byte-identical everywhere.
namespace ctpji::rng {

using Engine = std::mt19937_64;

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (const char ch : text) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Independent stream seed for (parent seed, key).
[[nodiscard]] constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t key) noexcept {
    return splitmix64(splitmix64(seed) ^ splitmix64(key + 0x632BE59BD9B4E019ull));
}

[[nodiscard]] constexpr std::uint64_t derive(std::uint64_t seed, std::string_view key) noexcept {
    return derive(seed, fnv1a(key));
}

/// Uniform in [0, 1) with 53 random bits.
[[nodiscard]] inline double uniform01(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

[[nodiscard]] inline double uniform(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform01(engine);
}

/// Uniform integer in [0, n) by rejection, n > 0.
[[nodiscard]] inline std::uint64_t below(Engine& engine, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = engine();
    while (x >= limit) x = engine();
    return x % n;
}

/// Uniform integer in [lo, hi].
[[nodiscard]] inline std::int64_t between(Engine& engine, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(engine, static_cast<std::uint64_t>(hi - lo) + 1));
}

template <typename T>
void shuffle(std::vector<T>& items, Engine& engine) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(below(engine, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace ctpji::rng
