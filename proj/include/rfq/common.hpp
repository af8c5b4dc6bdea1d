#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfq {

static_assert(std::endian::native == std::endian::little,
              "serialized layouts assume a little-endian host");

// Error taxonomy shared by every module.
class RangeError : public std::out_of_range {
   public:
    using std::out_of_range::out_of_range;
};

// select() past the last occurrence; kept apart from RangeError on purpose.
class NotFoundError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

namespace bits {

// floor(lg x) for x >= 1
constexpr unsigned floor_log2(std::uint64_t x) { return 63u - static_cast<unsigned>(std::countl_zero(x)); }

// smallest e with 2^e >= x, x >= 1
constexpr unsigned ceil_log2(std::uint64_t x) { return x <= 1 ? 0u : floor_log2(x - 1) + 1; }

// bits needed to hold any value in [0..max_value]; never 0 so packed arrays stay addressable
constexpr unsigned width_for(std::uint64_t max_value) {
    return max_value == 0 ? 1u : floor_log2(max_value) + 1;
}

constexpr std::uint64_t low_mask(unsigned width) { return width >= 64 ? ~0ULL : ((1ULL << width) - 1); }

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

// position (0-based) of the (r+1)-th set bit of w; requires r < popcount(w)
inline unsigned select_in_word(std::uint64_t w, unsigned r) {
    for (unsigned byte = 0; byte < 8; ++byte) {
        std::uint64_t b = (w >> (8 * byte)) & 0xFFu;
        auto c = static_cast<unsigned>(std::popcount(b));
        if (r < c) {
            for (; r > 0; --r) b &= b - 1;
            return 8 * byte + static_cast<unsigned>(std::countr_zero(b));
        }
        r -= c;
    }
    return 64;
}

}  // namespace bits

// Per-query tallies. Always collected; the index itself never mutates.
struct QueryStats {
    std::uint64_t accesses = 0;
    std::uint64_t ranks = 0;
    std::uint64_t selects = 0;
    std::uint64_t partial_ranks = 0;
    std::uint64_t candidates = 0;
    std::uint64_t c_probes = 0;
    std::uint64_t listing_steps = 0;
    std::uint64_t mode_iterations = 0;

    std::uint64_t sequence_ops() const { return ranks + selects + partial_ranks; }

    QueryStats& operator+=(const QueryStats& o) {
        accesses += o.accesses;
        ranks += o.ranks;
        selects += o.selects;
        partial_ranks += o.partial_ranks;
        candidates += o.candidates;
        c_probes += o.c_probes;
        listing_steps += o.listing_steps;
        mode_iterations += o.mode_iterations;
        return *this;
    }
};

}  // namespace rfq
