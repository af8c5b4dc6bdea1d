#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "common.hpp"
#include "serialize.hpp"

namespace rfq {

// Array of w-bit digits (2 <= w <= 6) with rank/select per digit value. Digits never
// straddle words; counting inside a word is broadword (zero-field detection after XOR).
class DigitSequence {
   public:
    DigitSequence() = default;

    DigitSequence(const std::vector<std::uint8_t>& digits, unsigned width) : width_(width), n_(digits.size()) {
        if (width_ < 2 || width_ > 6) throw ConfigError("digit width must be in [2..6]");
        init_layout();
        words_.assign(bits::ceil_div(n_, per_word_) + 1, 0);
        for (std::uint64_t k = 0; k < n_; ++k) {
            if (digits[k] >> width_) throw DomainError("digit exceeds width");
            words_[k / per_word_] |= static_cast<std::uint64_t>(digits[k]) << (width_ * (k % per_word_));
        }
        build_directory();
    }

    std::uint64_t size() const { return n_; }
    unsigned width() const { return width_; }

    unsigned operator[](std::uint64_t idx) const {
        return (words_[idx / per_word_] >> (width_ * (idx % per_word_))) & bits::low_mask(width_);
    }

    // occurrences of d among the first p digits
    std::uint64_t rank(unsigned d, std::uint64_t p) const {
        std::uint64_t digits_per_super = per_word_ * words_per_super_;
        std::uint64_t s = p / digits_per_super;
        std::uint64_t r = super_count(s, d);
        std::uint64_t w = s * words_per_super_;
        std::uint64_t end = p / per_word_;
        for (; w < end; ++w) r += count_in_word(words_[w], d, per_word_);
        if (p % per_word_) r += count_in_word(words_[w], d, p % per_word_);
        return r;
    }

    // 1-based position of the r-th occurrence of d; requires 1 <= r <= rank(d, size())
    std::uint64_t select(unsigned d, std::uint64_t r) const {
        std::uint64_t lo = 0, hi = supers_ - 1;
        while (lo < hi) {
            std::uint64_t mid = (lo + hi + 1) / 2;
            if (super_count(mid, d) < r) lo = mid;
            else hi = mid - 1;
        }
        std::uint64_t left = r - super_count(lo, d);
        for (std::uint64_t w = lo * words_per_super_;; ++w) {
            unsigned fields = static_cast<unsigned>(std::min<std::uint64_t>(per_word_, n_ - std::min(n_, w * per_word_)));
            std::uint64_t c = count_in_word(words_[w], d, fields);
            if (left <= c) {
                for (unsigned f = 0;; ++f)
                    if (((words_[w] >> (width_ * f)) & bits::low_mask(width_)) == d && --left == 0)
                        return w * per_word_ + f + 1;
            }
            left -= c;
        }
    }

    std::uint64_t size_in_bits() const {
        return 64 * words_.size() + 64 * l0_.size() + 16 * l1_.size() + 192;
    }

    void save(Writer& w) const {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(width_));
        w.put(n_);
        w.put_vector(words_);
        w.put_vector(l0_);
        w.put_vector(l1_);
    }

    static DigitSequence load(Reader& r) {
        DigitSequence s;
        s.width_ = r.get<std::uint8_t>();
        if (s.width_ < 2 || s.width_ > 6) throw FormatError("digit width");
        s.n_ = r.get<std::uint64_t>();
        s.init_layout();
        s.words_ = r.get_vector<std::uint64_t>();
        s.l0_ = r.get_vector<std::uint64_t>();
        s.l1_ = r.get_vector<std::uint16_t>();
        if (s.words_.size() != bits::ceil_div(s.n_, s.per_word_) + 1 || s.l1_.size() != s.supers_ * s.values() ||
            s.l0_.size() != bits::ceil_div(s.supers_, s.supers_per_region_) * s.values())
            throw FormatError("digit sequence shape mismatch");
        return s;
    }

    bool operator==(const DigitSequence&) const = default;

   private:
    unsigned values() const { return 1u << width_; }

    void init_layout() {
        per_word_ = 64 / width_;
        // keep the per-value counters near 1/8 of the payload
        words_per_super_ = std::max<std::uint64_t>(32, 2ULL << width_);
        supers_per_region_ = std::max<std::uint64_t>(1, 65535 / (words_per_super_ * per_word_));
        supers_ = bits::ceil_div(n_, per_word_ * words_per_super_) + 1;
        std::uint64_t f = 0;
        for (unsigned k = 0; k < per_word_; ++k) f |= 1ULL << (width_ * k);
        ones_ = f;
        high_ = f << (width_ - 1);
        low_bits_ = f * bits::low_mask(width_ - 1);
    }

    std::uint64_t super_count(std::uint64_t s, unsigned d) const {
        return l0_[(s / supers_per_region_) * values() + d] + l1_[s * values() + d];
    }

    std::uint64_t count_in_word(std::uint64_t x, unsigned d, unsigned fields) const {
        std::uint64_t t = x ^ (ones_ * d);
        std::uint64_t nonzero = (((t & low_bits_) + low_bits_) | t) & high_;
        std::uint64_t valid = high_ & bits::low_mask(width_ * fields);
        return std::popcount(~nonzero & valid);
    }

    void build_directory() {
        l0_.assign(bits::ceil_div(supers_, supers_per_region_) * values(), 0);
        l1_.assign(supers_ * values(), 0);
        std::vector<std::uint64_t> total(values(), 0);
        for (std::uint64_t s = 0; s < supers_; ++s) {
            std::uint64_t region = s / supers_per_region_;
            for (unsigned d = 0; d < values(); ++d) {
                if (s % supers_per_region_ == 0) l0_[region * values() + d] = total[d];
                l1_[s * values() + d] = static_cast<std::uint16_t>(total[d] - l0_[region * values() + d]);
            }
            for (std::uint64_t k = s * per_word_ * words_per_super_; k < std::min(n_, (s + 1) * per_word_ * words_per_super_); ++k)
                ++total[(*this)[k]];
        }
    }

    unsigned width_ = 2;
    std::uint64_t n_ = 0;
    unsigned per_word_ = 32;
    std::uint64_t words_per_super_ = 32;
    std::uint64_t supers_per_region_ = 1;
    std::uint64_t supers_ = 1;
    std::uint64_t ones_ = 0, high_ = 0, low_bits_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> l0_;
    std::vector<std::uint16_t> l1_;
};

}  // namespace rfq
