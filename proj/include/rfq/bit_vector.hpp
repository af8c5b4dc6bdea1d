#pragma once

#include <bit>
#include <cstdint>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "serialize.hpp"

namespace rfq {

// Plain bitvector with a two-level rank directory and sampled select.
//
// Positions are 1-based at the interface: rank1(p) counts ones among bits 1..p,
// select1(r) returns the position of the r-th one. operator[] is 0-based.
class BitVector {
   public:
    static constexpr unsigned kSuperBits = 512;
    static constexpr unsigned kWordsPerSuper = kSuperBits / 64;
    static constexpr unsigned kSupersPerRegion = 128;  // 2^16 bits per absolute counter
    static constexpr std::uint64_t kSelectSample = 512;

    BitVector() { build_directories(); }

    BitVector(std::vector<std::uint64_t> words, std::uint64_t n_bits) : n_(n_bits), words_(std::move(words)) {
        words_.resize(bits::ceil_div(n_, 64) + 1, 0);
        if (n_ % 64) words_[n_ / 64] &= bits::low_mask(n_ % 64);
        for (std::size_t w = bits::ceil_div(n_, 64); w < words_.size(); ++w) words_[w] = 0;
        build_directories();
    }

    static BitVector from_string(std::string_view s) {
        std::vector<std::uint64_t> words(bits::ceil_div(s.size(), 64) + 1, 0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') words[i / 64] |= 1ULL << (i % 64);
            else if (s[i] != '0') throw DomainError("bit string may only contain 0 and 1");
        }
        return BitVector(std::move(words), s.size());
    }

    // positions are 0-based indices
    template <class Vec>
    static BitVector from_indices(std::uint64_t n_bits, const Vec& indices) {
        std::vector<std::uint64_t> words(bits::ceil_div(n_bits, 64) + 1, 0);
        for (auto idx : indices) {
            if (static_cast<std::uint64_t>(idx) >= n_bits) throw RangeError("bit index out of range");
            words[idx / 64] |= 1ULL << (idx % 64);
        }
        return BitVector(std::move(words), n_bits);
    }

    std::uint64_t size() const { return n_; }
    std::uint64_t ones() const { return ones_; }
    std::uint64_t zeros() const { return n_ - ones_; }

    bool operator[](std::uint64_t idx) const { return (words_[idx >> 6] >> (idx & 63)) & 1; }

    std::uint64_t word(std::uint64_t w) const { return words_[w]; }

    std::uint64_t rank1(std::uint64_t p) const {
        if (p > n_) throw RangeError("rank position " + std::to_string(p) + " beyond " + std::to_string(n_));
        return rank1_unchecked(p);
    }

    std::uint64_t rank0(std::uint64_t p) const { return p - rank1(p); }

    std::uint64_t rank1_unchecked(std::uint64_t p) const {
        std::uint64_t s = p / kSuperBits;
        std::uint64_t r = super_ones(s);
        std::uint64_t w = s * kWordsPerSuper;
        for (const std::uint64_t end = p >> 6; w < end; ++w) r += std::popcount(words_[w]);
        if (p & 63) r += std::popcount(words_[w] & bits::low_mask(p & 63));
        return r;
    }

    std::uint64_t select1(std::uint64_t r) const {
        if (r == 0 || r > ones_) throw NotFoundError("select1 rank " + std::to_string(r) + " of " + std::to_string(ones_));
        return select_impl<true>(r);
    }

    std::uint64_t select0(std::uint64_t r) const {
        if (r == 0 || r > zeros()) throw NotFoundError("select0 rank " + std::to_string(r) + " of " + std::to_string(zeros()));
        return select_impl<false>(r);
    }

    // Calls f(position) for each one in positions [i..j]; f returns false to stop.
    template <class F>
    bool for_each_one(std::uint64_t i, std::uint64_t j, F&& f) const {
        if (i == 0 || j > n_) throw RangeError("bitvector range out of bounds");
        if (i > j) return true;
        std::uint64_t lo = i - 1, hi = j;  // 0-based half-open
        for (std::uint64_t w = lo >> 6; w <= (hi - 1) >> 6; ++w) {
            std::uint64_t x = words_[w];
            if (w == lo >> 6) x &= ~bits::low_mask(lo & 63);
            if (w == (hi - 1) >> 6 && (hi & 63)) x &= bits::low_mask(hi & 63);
            while (x) {
                if (!f(w * 64 + std::countr_zero(x) + 1)) return false;
                x &= x - 1;
            }
        }
        return true;
    }

    std::uint64_t size_in_bits() const {
        return 64 * words_.size() + 64 * l0_.size() + 16 * l1_.size() + 32 * (sel1_.size() + sel0_.size()) + 128;
    }

    void save(Writer& w) const {
        w.put_magic("RFQB", 1);
        w.put<std::uint8_t>('P');
        w.put(n_);
        w.put(ones_);
        w.put_vector(words_);
        w.put_vector(l0_);
        w.put_vector(l1_);
        w.put_vector(sel1_);
        w.put_vector(sel0_);
    }

    static BitVector load(Reader& r) {
        r.expect_magic("RFQB", 1);
        if (r.get<std::uint8_t>() != 'P') throw FormatError("expected plain bitvector");
        BitVector bv;
        bv.n_ = r.get<std::uint64_t>();
        bv.ones_ = r.get<std::uint64_t>();
        bv.words_ = r.get_vector<std::uint64_t>();
        bv.l0_ = r.get_vector<std::uint64_t>();
        bv.l1_ = r.get_vector<std::uint16_t>();
        bv.sel1_ = r.get_vector<std::uint32_t>();
        bv.sel0_ = r.get_vector<std::uint32_t>();
        std::uint64_t supers = bv.n_ / kSuperBits + 2;
        if (bv.words_.size() != bits::ceil_div(bv.n_, 64) + 1 || bv.l1_.size() != supers ||
            bv.l0_.size() != bits::ceil_div(supers, kSupersPerRegion) || bv.ones_ > bv.n_ ||
            bv.sel1_.size() != bits::ceil_div(bv.ones_, kSelectSample) + 1 ||
            bv.sel0_.size() != bits::ceil_div(bv.n_ - bv.ones_, kSelectSample) + 1)
            throw FormatError("bitvector directory shape mismatch");
        return bv;
    }

    bool operator==(const BitVector&) const = default;

   private:
    std::uint64_t super_ones(std::uint64_t s) const { return l0_[s / kSupersPerRegion] + l1_[s]; }

    std::uint64_t super_count(std::uint64_t s, bool one) const {
        return one ? super_ones(s) : s * kSuperBits - super_ones(s);
    }

    template <bool One>
    std::uint64_t select_impl(std::uint64_t r) const {
        const auto& samples = One ? sel1_ : sel0_;
        std::uint64_t k = (r - 1) / kSelectSample;
        std::uint64_t lo = samples[k], hi = samples[k + 1];
        // largest superblock s in [lo..hi] whose prefix count is below r
        while (lo < hi) {
            std::uint64_t mid = (lo + hi + 1) / 2;
            if (super_count(mid, One) < r) lo = mid;
            else hi = mid - 1;
        }
        std::uint64_t left = r - super_count(lo, One);
        for (std::uint64_t w = lo * kWordsPerSuper;; ++w) {
            std::uint64_t x = One ? words_[w] : ~words_[w];
            auto c = static_cast<std::uint64_t>(std::popcount(x));
            if (left <= c) return w * 64 + bits::select_in_word(x, static_cast<unsigned>(left - 1)) + 1;
            left -= c;
        }
    }

    void build_directories() {
        words_.resize(bits::ceil_div(n_, 64) + 1, 0);
        std::uint64_t supers = n_ / kSuperBits + 2;
        l0_.assign(bits::ceil_div(supers, kSupersPerRegion), 0);
        l1_.assign(supers, 0);
        std::uint64_t total = 0;
        for (std::uint64_t s = 0; s < supers; ++s) {
            if (s % kSupersPerRegion == 0) l0_[s / kSupersPerRegion] = total;
            l1_[s] = static_cast<std::uint16_t>(total - l0_[s / kSupersPerRegion]);
            for (std::uint64_t w = s * kWordsPerSuper; w < (s + 1) * kWordsPerSuper && w < words_.size(); ++w)
                total += std::popcount(words_[w]);
        }
        ones_ = total;
        sel1_.clear();
        sel0_.clear();
        std::uint64_t want1 = 1, want0 = 1;
        for (std::uint64_t s = 0; s + 1 < supers; ++s) {
            std::uint64_t after1 = super_ones(s + 1);
            std::uint64_t after0 = std::min(n_, (s + 1) * kSuperBits) - after1;
            while (want1 <= ones_ && want1 <= after1) {
                sel1_.push_back(static_cast<std::uint32_t>(s));
                want1 += kSelectSample;
            }
            while (want0 <= zeros() && want0 <= after0) {
                sel0_.push_back(static_cast<std::uint32_t>(s));
                want0 += kSelectSample;
            }
        }
        sel1_.push_back(static_cast<std::uint32_t>(supers - 1));
        sel0_.push_back(static_cast<std::uint32_t>(supers - 1));
    }

    std::uint64_t n_ = 0;
    std::uint64_t ones_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> l0_;
    std::vector<std::uint16_t> l1_;
    std::vector<std::uint32_t> sel1_;
    std::vector<std::uint32_t> sel0_;
};

}  // namespace rfq
