#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace rfq::gen {

using Rng = std::mt19937_64;

inline std::vector<std::uint32_t> uniform_string(Rng& rng, std::size_t n, std::uint32_t sigma) {
    std::uniform_int_distribution<std::uint32_t> d(1, sigma);
    std::vector<std::uint32_t> s(n);
    for (auto& x : s) x = d(rng);
    return s;
}

// symbol a drawn with weight a^-exponent
inline std::vector<std::uint32_t> zipf_string(Rng& rng, std::size_t n, std::uint32_t sigma, double exponent) {
    std::vector<double> w(sigma);
    for (std::uint32_t a = 0; a < sigma; ++a) w[a] = std::pow(a + 1.0, -exponent);
    std::discrete_distribution<std::uint32_t> d(w.begin(), w.end());
    std::vector<std::uint32_t> s(n);
    for (auto& x : s) x = d(rng) + 1;
    return s;
}

// symbols in [1..sigma] are not all guaranteed to occur; indexes accept that
inline std::vector<std::uint32_t> random_string(Rng& rng, std::size_t n, std::uint32_t sigma, bool zipf) {
    return zipf ? zipf_string(rng, n, sigma, 1.1) : uniform_string(rng, n, sigma);
}

inline std::vector<std::uint32_t> example_string() { return {1, 2, 3, 1, 4, 1, 5, 1, 2, 3, 1}; }

inline std::pair<std::uint64_t, std::uint64_t> random_range(Rng& rng, std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(1, n);
    auto a = d(rng), b = d(rng);
    if (a > b) std::swap(a, b);
    return {a, b};
}

// ranges biased toward both short and long lengths
inline std::pair<std::uint64_t, std::uint64_t> mixed_range(Rng& rng, std::uint64_t n) {
    if (rng() % 2) return random_range(rng, n);
    unsigned lg = static_cast<unsigned>(std::log2(static_cast<double>(n))) + 1;
    std::uint64_t len = std::min<std::uint64_t>(n, 1 + rng() % (1ULL << (rng() % lg + 1)));
    std::uint64_t i = 1 + rng() % (n - len + 1);
    return {i, i + len - 1};
}

}  // namespace rfq::gen
