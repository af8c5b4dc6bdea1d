#pragma once

// Brute-force reference answers computed straight from the raw array. Deliberately
// shares nothing with the index code so it can serve as ground truth.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rfq::oracle {

using Histogram = std::map<std::uint32_t, std::uint64_t>;
using Counted = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

inline void check_range(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j) {
    if (i < 1 || i > j || j > s.size()) throw std::out_of_range("oracle range");
}

// S is 0-indexed storage of the 1-based sequence: S[k] lives at s[k-1].
inline Histogram count(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j) {
    check_range(s, i, j);
    Histogram h;
    for (std::uint64_t k = i; k <= j; ++k) ++h[s[k - 1]];
    return h;
}

inline bool is_majority(std::uint64_t occ, std::uint64_t len, double tau) {
    return static_cast<double>(occ) > tau * static_cast<double>(len);
}

inline Counted majorities(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j, double tau) {
    Counted out;
    for (auto [a, c] : count(s, i, j))
        if (is_majority(c, j - i + 1, tau)) out.emplace_back(a, c);
    return out;
}

inline Counted minorities(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j, double tau) {
    Counted out;
    for (auto [a, c] : count(s, i, j))
        if (!is_majority(c, j - i + 1, tau)) out.emplace_back(a, c);
    return out;
}

// ties go to the smallest symbol
inline std::pair<std::uint32_t, std::uint64_t> mode(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j) {
    std::pair<std::uint32_t, std::uint64_t> best{0, 0};
    for (auto [a, c] : count(s, i, j))
        if (c > best.second) best = {a, c};
    return best;
}

// distinct symbols of S[i..j] with their leftmost positions, by symbol
inline std::map<std::uint32_t, std::uint64_t> leftmost(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j) {
    check_range(s, i, j);
    std::map<std::uint32_t, std::uint64_t> out;
    for (std::uint64_t k = i; k <= j; ++k) out.emplace(s[k - 1], k);
    return out;
}

inline std::uint64_t rank(const std::vector<std::uint32_t>& s, std::uint32_t a, std::uint64_t k) {
    std::uint64_t r = 0;
    for (std::uint64_t p = 1; p <= k; ++p) r += s[p - 1] == a;
    return r;
}

inline std::optional<std::uint64_t> select(const std::vector<std::uint32_t>& s, std::uint32_t a, std::uint64_t r) {
    for (std::uint64_t p = 1; p <= s.size(); ++p)
        if (s[p - 1] == a && --r == 0) return p;
    return std::nullopt;
}

inline std::uint64_t previous(const std::vector<std::uint32_t>& s, std::uint64_t k) {
    for (std::uint64_t p = k - 1; p >= 1; --p)
        if (s[p - 1] == s[k - 1]) return p;
    return 0;
}

struct Result {
    Histogram counts;
    Counted majorities;
    Counted minorities;
    std::pair<std::uint32_t, std::uint64_t> mode;
};

inline Result evaluate(const std::vector<std::uint32_t>& s, std::uint64_t i, std::uint64_t j, double tau) {
    Result r;
    r.counts = count(s, i, j);
    for (auto [a, c] : r.counts) {
        (is_majority(c, j - i + 1, tau) ? r.majorities : r.minorities).emplace_back(a, c);
        if (c > r.mode.second) r.mode = {a, c};
    }
    return r;
}

}  // namespace rfq::oracle
