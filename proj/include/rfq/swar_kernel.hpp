#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "common.hpp"

namespace rfq {

// Unsigned register of Bits bits held in little-endian 64-bit words; arithmetic is mod 2^Bits.
template <unsigned Bits>
class WideReg {
   public:
    static constexpr unsigned kWords = (Bits + 63) / 64;

    WideReg() = default;

    static WideReg bit(unsigned pos) {
        WideReg r;
        r.w_[pos / 64] = 1ULL << (pos % 64);
        return r;
    }

    // places v (< 2^64) at bit offset pos
    static WideReg value_at(std::uint64_t v, unsigned pos) {
        WideReg r;
        r.w_[pos / 64] = v << (pos % 64);
        if (pos % 64 && pos / 64 + 1 < kWords) r.w_[pos / 64 + 1] = v >> (64 - pos % 64);
        r.trim();
        return r;
    }

    std::uint64_t field(unsigned pos, unsigned width) const {
        std::uint64_t v = w_[pos / 64] >> (pos % 64);
        if (pos % 64 && pos / 64 + 1 < kWords) v |= w_[pos / 64 + 1] << (64 - pos % 64);
        return v & bits::low_mask(width);
    }

    bool test(unsigned pos) const { return (w_[pos / 64] >> (pos % 64)) & 1; }

    bool is_zero() const {
        for (auto x : w_)
            if (x) return false;
        return true;
    }

    unsigned countr_zero() const {
        for (unsigned k = 0; k < kWords; ++k)
            if (w_[k]) return 64 * k + static_cast<unsigned>(std::countr_zero(w_[k]));
        return Bits;
    }

    friend WideReg operator+(const WideReg& a, const WideReg& b) {
        WideReg r;
        unsigned carry = 0;
        for (unsigned k = 0; k < kWords; ++k) {
            std::uint64_t s = a.w_[k] + b.w_[k];
            unsigned c1 = s < a.w_[k];
            r.w_[k] = s + carry;
            carry = c1 | (r.w_[k] < s);
        }
        r.trim();
        return r;
    }

    friend WideReg operator-(const WideReg& a, const WideReg& b) {
        WideReg r;
        unsigned borrow = 0;
        for (unsigned k = 0; k < kWords; ++k) {
            std::uint64_t d = a.w_[k] - b.w_[k];
            unsigned b1 = a.w_[k] < b.w_[k];
            r.w_[k] = d - borrow;
            borrow = b1 | (d < borrow);
        }
        r.trim();
        return r;
    }

    friend WideReg operator*(const WideReg& a, const WideReg& b) {
        WideReg r;
        for (unsigned x = 0; x < kWords; ++x) {
            if (!a.w_[x]) continue;
            unsigned __int128 carry = 0;
            for (unsigned y = 0; x + y < kWords; ++y) {
                unsigned __int128 t = static_cast<unsigned __int128>(a.w_[x]) * b.w_[y] + r.w_[x + y] + carry;
                r.w_[x + y] = static_cast<std::uint64_t>(t);
                carry = t >> 64;
            }
        }
        r.trim();
        return r;
    }

    friend WideReg operator&(WideReg a, const WideReg& b) {
        for (unsigned k = 0; k < kWords; ++k) a.w_[k] &= b.w_[k];
        return a;
    }
    friend WideReg operator|(WideReg a, const WideReg& b) {
        for (unsigned k = 0; k < kWords; ++k) a.w_[k] |= b.w_[k];
        return a;
    }
    friend WideReg operator^(WideReg a, const WideReg& b) {
        for (unsigned k = 0; k < kWords; ++k) a.w_[k] ^= b.w_[k];
        return a;
    }
    WideReg operator~() const {
        WideReg r;
        for (unsigned k = 0; k < kWords; ++k) r.w_[k] = ~w_[k];
        r.trim();
        return r;
    }

    WideReg operator>>(unsigned s) const {
        WideReg r;
        unsigned ws = s / 64, bs = s % 64;
        for (unsigned k = 0; k + ws < kWords; ++k) {
            r.w_[k] = w_[k + ws] >> bs;
            if (bs && k + ws + 1 < kWords) r.w_[k] |= w_[k + ws + 1] << (64 - bs);
        }
        return r;
    }

    bool operator==(const WideReg&) const = default;

   private:
    void trim() {
        if constexpr (Bits % 64 != 0) w_[kWords - 1] &= bits::low_mask(Bits % 64);
    }

    std::array<std::uint64_t, kWords> w_{};
};

enum class Band { low, high, both };

// Word-parallel frequency counting for an alphabet of SigmaP symbols [0..SigmaP-1].
//
// A chunk of k = SigmaP symbols of l = lg SigmaP bits is copied SigmaP times at distance
// 2kl; copy i counts symbol i. Counters are 2l-bit fields at offset (k-1)l of each copy,
// with the bit at (k+1)l acting as the overflow (threshold) bit.
template <unsigned SigmaP>
struct Swar {
    static_assert(SigmaP == 2 || SigmaP == 4 || SigmaP == 8 || SigmaP == 16, "alphabet must be 2, 4, 8 or 16");

    static constexpr unsigned ell = std::countr_zero(SigmaP);
    static constexpr unsigned k = SigmaP;
    static constexpr unsigned stride = 2 * k * ell;
    static constexpr unsigned reg_bits = SigmaP * stride;
    static constexpr unsigned counter_at = (k - 1) * ell;
    static constexpr unsigned overflow_at = (k + 1) * ell;
    static constexpr std::uint64_t capacity = std::uint64_t{SigmaP} * k;  // symbols a counter word can absorb

    using Reg = WideReg<reg_bits>;

    // (0^{stride-1} 1)^{SigmaP} shifted by `offset`: one bit per copy
    static Reg per_copy(unsigned offset) {
        Reg r;
        for (unsigned i = 0; i < SigmaP; ++i) r = r | Reg::bit(i * stride + offset);
        return r;
    }

    struct Masks {
        Reg replicate;  // copies X into every copy slot
        Reg pattern;    // copy i holds (i_l)^k
        Reg high;       // Y: top bit of every field in every copy
        Reg spread;     // (0^{l-1} 1)^k in the low kl bits
        Reg last;       // flag of the last field, per copy
        Reg field;      // l-bit field at offset (k-1)l, per copy
        Reg unit;       // lowest counter bit, per copy
        Reg overflow;   // overflow bit, per copy
        Masks() {
            replicate = per_copy(0);
            for (unsigned i = 0; i < SigmaP; ++i)
                for (unsigned m = 0; m < k; ++m) {
                    pattern = pattern | Reg::value_at(i, i * stride + m * ell);
                    high = high | Reg::bit(i * stride + m * ell + ell - 1);
                }
            for (unsigned m = 0; m < k; ++m) spread = spread | Reg::bit(m * ell);
            last = per_copy(counter_at);
            for (unsigned i = 0; i < SigmaP; ++i) field = field | Reg::value_at(bits::low_mask(ell), i * stride + counter_at);
            unit = per_copy(counter_at);
            overflow = per_copy(overflow_at);
        }
    };

    static const Masks& masks() {
        static const Masks m;
        return m;
    }

    struct PackedChunk {
        Reg x;
        unsigned len = 0;
    };

    struct CounterWord {
        Reg c;
        std::uint64_t absorbed = 0;

        std::uint64_t count(unsigned symbol) const { return c.field(symbol * stride + counter_at, 2 * ell + 1); }

        std::vector<std::uint64_t> counts() const {
            std::vector<std::uint64_t> out(SigmaP);
            for (unsigned i = 0; i < SigmaP; ++i) out[i] = count(i);
            return out;
        }

        static CounterWord from_counts(const std::vector<std::uint64_t>& counts) {
            if (counts.size() != SigmaP) throw ConfigError("counter word needs one count per symbol");
            CounterWord w;
            for (unsigned i = 0; i < SigmaP; ++i) {
                if (counts[i] > capacity) throw DomainError("count exceeds counter capacity");
                w.c = w.c | Reg::value_at(counts[i], i * stride + counter_at);
                w.absorbed += counts[i];
            }
            return w;
        }

        CounterWord& operator+=(const CounterWord& o) {
            if (absorbed + o.absorbed > capacity) throw std::logic_error("counter word capacity exceeded");
            c = c + o.c;
            absorbed += o.absorbed;
            return *this;
        }
    };

    // up to k symbols in [0..SigmaP-1]; missing slots are padded with symbol 0
    template <class It>
    static PackedChunk pack(It first, It last) {
        PackedChunk ch;
        for (; first != last; ++first) {
            auto a = static_cast<std::uint64_t>(*first);
            if (ch.len == k) throw ConfigError("chunk holds at most k symbols");
            if (a >= SigmaP) throw ConfigError("symbol outside the kernel alphabet");
            ch.x = ch.x | Reg::value_at(a, ch.len * ell);
            ++ch.len;
        }
        return ch;
    }

    // counters of one chunk; the k - len padding zeros are counted as symbol 0
    static CounterWord count_chunk(const PackedChunk& ch) {
        const Masks& m = masks();
        Reg x = ch.x * m.replicate;
        x = x ^ m.pattern;
        x = (m.high - (x & ~m.high)) & m.high & ~x;  // top bit of fields equal to the copy's symbol
        x = x >> (ell - 1);                          // flags to the low bit of each field
        // Sum the flags of fields 0..k-2 into field k-1; the last flag is added apart so the
        // sum stays below 2^l and no field carries into its neighbour.
        Reg lastflag = x & m.last;
        x = ((x & ~m.last) * m.spread) & m.field;
        CounterWord w;
        w.c = x + lastflag;
        w.absorbed = k;
        return w;
    }

    static CounterWord pad_correction(CounterWord w, unsigned pad) {
        if (pad >= k) throw ConfigError("padding must be shorter than a chunk");
        if (w.count(0) < pad) throw std::logic_error("padding correction underflows counter 0");
        w.c = w.c - Reg::value_at(pad, counter_at);
        w.absorbed -= pad;
        return w;
    }

    // overflow bits of counters >= y
    static Reg at_least(const CounterWord& w, std::uint64_t y) {
        const std::uint64_t top = std::uint64_t{1} << (2 * ell);
        if (y > top) return Reg{};
        return (w.c + masks().unit * Reg::value_at(top - y, 0)) & masks().overflow;
    }

    static std::vector<unsigned> threshold_extract(const CounterWord& w, std::uint64_t y, Band band) {
        if (y == 0) throw DomainError("threshold must be at least 1");
        Reg hi = at_least(w, y);
        Reg flags;
        if (band == Band::high) flags = hi;
        else if (band == Band::low) flags = at_least(w, 1) & ~hi;
        else flags = at_least(w, 1);
        std::vector<unsigned> out;
        const Reg one = Reg::bit(0);
        while (!flags.is_zero()) {
            Reg d = (flags ^ (flags - one)) & flags;  // lowest set bit alone
            out.push_back((d.countr_zero() - overflow_at) / stride);
            flags = flags & (flags - one);
        }
        return out;
    }

    // counts of a whole symbol range of at most `capacity` symbols
    template <class It>
    static CounterWord count_range(It first, It last) {
        CounterWord total;
        while (first != last) {
            It stop = first;
            unsigned len = 0;
            while (stop != last && len < k) ++stop, ++len;
            auto ch = pack(first, stop);
            auto w = count_chunk(ch);
            if (len < k) w = pad_correction(w, k - len);
            total += w;
            first = stop;
        }
        return total;
    }
};

// Runtime front end: (symbol, count) for the symbols of the range (values in
// [0..sigma_p-1]) whose count is >= y (Band::high), in [1..y-1] (Band::low), or >= 1
// (Band::both), ascending by symbol.
inline std::vector<std::pair<unsigned, std::uint64_t>> swar_band_counts(const std::vector<std::uint32_t>& symbols, unsigned sigma_p,
                                                                         std::uint64_t y, Band band) {
    auto run = [&](auto kernel) {
        using K = decltype(kernel);
        if (symbols.size() > K::capacity) throw ConfigError("range exceeds kernel capacity");
        auto w = K::count_range(symbols.begin(), symbols.end());
        std::vector<std::pair<unsigned, std::uint64_t>> out;
        for (unsigned a : K::threshold_extract(w, y, band)) out.emplace_back(a, w.count(a));
        return out;
    };
    switch (sigma_p) {
        case 2: return run(Swar<2>{});
        case 4: return run(Swar<4>{});
        case 8: return run(Swar<8>{});
        case 16: return run(Swar<16>{});
        default: throw ConfigError("kernel alphabet must be 2, 4, 8 or 16");
    }
}

inline std::vector<unsigned> swar_select_symbols(const std::vector<std::uint32_t>& symbols, unsigned sigma_p, std::uint64_t y, Band band) {
    std::vector<unsigned> out;
    for (auto [a, c] : swar_band_counts(symbols, sigma_p, y, band)) out.push_back(a);
    return out;
}

// smallest kernel alphabet covering sigma whose capacity fits len symbols, or 0
inline unsigned swar_alphabet_for(std::uint64_t sigma, std::uint64_t len) {
    for (unsigned sp : {2u, 4u, 8u, 16u})
        if (sp >= sigma && std::uint64_t{sp} * sp >= len) return sp;
    return 0;
}

}  // namespace rfq
