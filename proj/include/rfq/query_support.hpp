#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "wavelet_sequence.hpp"

namespace rfq {

enum class Verify : std::uint8_t { rank = 0, check = 1 };
enum class Dispatch : std::uint8_t { automatic = 0, sequential = 1, flagged = 2 };

// Query-time parameters. A symbol is a tau-majority iff occ > tau * len, computed in
// double; for integral occ that is occ >= threshold + 1 with threshold = floor(tau * len).
struct QueryParams {
    std::uint64_t i = 0, j = 0, len = 0;
    double tau = 1;
    unsigned t = 0;  // smallest t with 2^t * tau >= 1, capped at 64
    unsigned b = 0;  // floor(lg len)
    std::uint64_t threshold = 0;

    static QueryParams make(std::uint64_t i, std::uint64_t j, double tau, std::uint64_t n) {
        if (i == 0 || i > j || j > n)
            throw RangeError("query range [" + std::to_string(i) + ".." + std::to_string(j) + "] outside [1.." + std::to_string(n) + "]");
        if (!(tau > 0 && tau <= 1)) throw DomainError("tau must lie in (0, 1]");
        QueryParams p;
        p.i = i;
        p.j = j;
        p.len = j - i + 1;
        p.tau = tau;
        while (p.t < 64 && std::ldexp(tau, static_cast<int>(p.t)) < 1) ++p.t;
        p.b = bits::floor_log2(p.len);
        p.threshold = static_cast<std::uint64_t>(std::floor(tau * static_cast<double>(p.len)));
        return p;
    }

    bool is_majority(std::uint64_t occ) const { return occ > threshold; }
    bool is_minority(std::uint64_t occ) const { return occ >= 1 && occ <= threshold; }
    // ceil(1/tau): any that many distinct symbols of a range include a minority
    std::uint64_t distinct_cap() const {
        double m = std::ceil(1.0 / tau);
        return m >= 0x1p62 ? std::uint64_t{1} << 62 : static_cast<std::uint64_t>(m);
    }
    // no symbol can be a majority: the alphabet is smaller than 1/tau
    bool below_alphabet(std::uint32_t sigma) const { return tau * static_cast<double>(sigma) < 1; }
};

using Counted = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

namespace detail {

// Build-time view of the raw sequence: occurrence lists per symbol and the previous and
// next occurrence of every position (0 and n+1 when absent).
struct Occurrences {
    std::vector<std::uint64_t> offset;  // symbol a owns pos[offset[a]..offset[a+1])
    std::vector<std::uint64_t> pos;     // 1-based positions
    std::vector<std::uint64_t> prev, next;

    Occurrences(const std::vector<std::uint32_t>& s, std::uint32_t sigma)
        : offset(static_cast<std::size_t>(sigma) + 2, 0), pos(s.size()), prev(s.size()), next(s.size()) {
        for (auto a : s) ++offset[a + 1];
        for (std::size_t a = 1; a < offset.size(); ++a) offset[a] += offset[a - 1];
        std::vector<std::uint64_t> fill(offset.begin(), offset.end() - 1);
        for (std::uint64_t k = 0; k < s.size(); ++k) pos[fill[s[k]]++] = k + 1;
        for (std::uint32_t a = 1; a <= sigma; ++a)
            for (std::uint64_t x = offset[a]; x < offset[a + 1]; ++x) {
                prev[pos[x] - 1] = x > offset[a] ? pos[x - 1] : 0;
                next[pos[x] - 1] = x + 1 < offset[a + 1] ? pos[x + 1] : s.size() + 1;
            }
    }

    const std::uint64_t* begin(std::uint32_t a) const { return pos.data() + offset[a]; }
    const std::uint64_t* end(std::uint32_t a) const { return pos.data() + offset[a + 1]; }
    std::uint64_t count(std::uint32_t a) const { return offset[a + 1] - offset[a]; }
};

inline std::uint64_t counted_rank(const WaveletSequence& seq, std::uint32_t a, std::uint64_t k, QueryStats& st) {
    ++st.ranks;
    return seq.rank(a, k);
}

inline std::optional<std::uint64_t> counted_select(const WaveletSequence& seq, std::uint32_t a, std::uint64_t r, QueryStats& st) {
    ++st.selects;
    return seq.select(a, r);
}

inline std::uint64_t range_count(const WaveletSequence& seq, std::uint32_t a, std::uint64_t i, std::uint64_t j, QueryStats& st) {
    return counted_rank(seq, a, j, st) - (i > 1 ? counted_rank(seq, a, i - 1, st) : 0);
}

// Smallest rank r in [lo..hi] whose occurrence of a lies at or after position i, given
// that the hi-th occurrence does. Gallops down from hi, so the cost is logarithmic in the
// distance to the answer.
inline std::uint64_t first_rank_at_least(const WaveletSequence& seq, std::uint32_t a, std::uint64_t lo, std::uint64_t hi,
                                         std::uint64_t i, QueryStats& st) {
    std::uint64_t good = hi, step = 1;
    while (good > lo) {
        std::uint64_t probe = good - std::min(step, good - lo);
        if (*counted_select(seq, a, probe, st) >= i) {
            good = probe;
            step *= 2;
        } else {
            lo = probe + 1;
            break;
        }
    }
    while (lo < good) {
        std::uint64_t mid = lo + (good - lo) / 2;
        if (*counted_select(seq, a, mid, st) >= i) good = mid;
        else lo = mid + 1;
    }
    return good;
}

// The check: with r the rank of the leftmost occurrence of a in [i..j], a is a majority
// iff its (r + threshold)-th occurrence exists and lies within j.
inline bool check_from_leftmost(const WaveletSequence& seq, std::uint32_t a, std::uint64_t r, const QueryParams& p, QueryStats& st) {
    if (p.threshold == 0) return true;
    auto x = counted_select(seq, a, r + p.threshold, st);
    return x && *x <= p.j;
}

// S[i..j] shifted to 0-based symbols, for the word-parallel kernel
inline std::vector<std::uint32_t> shifted_extract(const WaveletSequence& seq, std::uint64_t i, std::uint64_t j, QueryStats& st) {
    st.accesses += j - i + 1;
    auto out = seq.extract(i, j);
    for (auto& a : out) --a;
    return out;
}

// Distinct-head scan of S[l..r]: visits each distinct symbol at its leftmost position
// with its exact count inside [l..r], deleting all its occurrences before moving on.
// visit(a, leftmost, occ, remaining) returns false to stop.
template <class Visit>
void scan_heads(const WaveletSequence& seq, std::uint64_t l, std::uint64_t r, QueryStats& st, Visit&& visit) {
    std::vector<bool> removed(r - l + 1, false);
    std::uint64_t remaining = r - l + 1;
    for (std::uint64_t p = l; p <= r; ++p) {
        if (removed[p - l]) continue;
        ++st.partial_ranks;
        auto [a, rank] = seq.access_rank(p);
        std::uint64_t occ = 1;
        removed[p - l] = true;
        for (std::uint64_t q = rank + 1;; ++q) {
            auto x = counted_select(seq, a, q, st);
            if (!x || *x > r) break;
            removed[*x - l] = true;
            ++occ;
        }
        remaining -= occ;
        if (!visit(a, p, occ, remaining)) return;
    }
}

}  // namespace detail

}  // namespace rfq
