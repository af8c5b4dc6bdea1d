#pragma once

#include <cstdint>
#include <vector>

#include "bit_vector.hpp"
#include "common.hpp"
#include "packed_ints.hpp"
#include "serialize.hpp"

namespace rfq {

// Elias-Fano encoding of the set positions of a bitvector. Same interface as BitVector
// (1-based positions, rank over prefixes); rank costs a select0 on the upper half plus a
// bucket scan, select1 is a single select1 on the upper half.
class SparseBitVector {
   public:
    SparseBitVector() = default;

    // positions: strictly increasing, each in [1..n_bits]
    template <class Vec>
    SparseBitVector(std::uint64_t n_bits, const Vec& positions) : n_(n_bits), m_(positions.size()) {
        if (m_ == 0) return;
        low_bits_ = bits::ceil_log2(bits::ceil_div(n_, m_));
        low_ = PackedInts(m_, low_bits_ == 0 ? 1 : low_bits_);
        std::vector<std::uint64_t> upper(bits::ceil_div(upper_len(), 64) + 1, 0);
        std::uint64_t prev = 0;
        for (std::uint64_t k = 0; k < m_; ++k) {
            auto p = static_cast<std::uint64_t>(positions[k]);
            if (p == 0 || p > n_ || p <= prev) throw DomainError("sparse positions must increase within [1..n]");
            prev = p;
            std::uint64_t x = p - 1;
            if (low_bits_) low_.set(k, x & bits::low_mask(low_bits_));
            std::uint64_t at = (x >> low_bits_) + k;
            upper[at / 64] |= 1ULL << (at % 64);
        }
        upper_ = BitVector(std::move(upper), upper_len());
    }

    static SparseBitVector from_bits(const BitVector& bv) {
        std::vector<std::uint64_t> pos;
        pos.reserve(bv.ones());
        if (bv.size()) bv.for_each_one(1, bv.size(), [&](std::uint64_t p) { pos.push_back(p); return true; });
        return SparseBitVector(bv.size(), pos);
    }

    std::uint64_t size() const { return n_; }
    std::uint64_t ones() const { return m_; }
    std::uint64_t zeros() const { return n_ - m_; }

    bool operator[](std::uint64_t idx) const { return rank1(idx + 1) - rank1(idx) == 1; }

    std::uint64_t rank1(std::uint64_t p) const {
        if (p > n_) throw RangeError("rank position " + std::to_string(p) + " beyond " + std::to_string(n_));
        if (m_ == 0 || p == 0) return 0;
        if (p == n_) return m_;
        // count stored x = pos-1 with x < p
        std::uint64_t h = p >> low_bits_;
        std::uint64_t at = h == 0 ? 0 : upper_.select0(h);  // upper bits consumed by buckets < h
        std::uint64_t k = at - h;
        std::uint64_t lowp = p & bits::low_mask(low_bits_);
        while (low_bits_ && at < upper_.size() && upper_[at] && low_.get(k) < lowp) {
            ++k;
            ++at;
        }
        return k;
    }

    std::uint64_t rank0(std::uint64_t p) const { return p - rank1(p); }

    std::uint64_t select1(std::uint64_t r) const {
        if (r == 0 || r > m_) throw NotFoundError("select1 rank " + std::to_string(r) + " of " + std::to_string(m_));
        return value_at(r - 1);
    }

    // r-th zero: the answer is r + k where k is the number of ones before it, i.e. the
    // largest k with select1(k) - k <= r - 1.
    std::uint64_t select0(std::uint64_t r) const {
        if (r == 0 || r > zeros()) throw NotFoundError("select0 rank " + std::to_string(r) + " of " + std::to_string(zeros()));
        std::uint64_t lo = 0, hi = m_;
        while (lo < hi) {
            std::uint64_t mid = (lo + hi + 1) / 2;
            if (value_at(mid - 1) - mid <= r - 1) lo = mid;
            else hi = mid - 1;
        }
        return r + lo;
    }

    template <class F>
    bool for_each_one(std::uint64_t i, std::uint64_t j, F&& f) const {
        if (i == 0 || j > n_) throw RangeError("bitvector range out of bounds");
        if (i > j || m_ == 0) return true;
        std::uint64_t k = rank1(i - 1);
        if (k == m_) return true;
        std::uint64_t at = upper_.select1(k + 1) - 1;
        for (; k < m_; ++k, ++at) {
            while (!upper_[at]) ++at;
            std::uint64_t x = ((at - k) << low_bits_) | (low_bits_ ? low_.get(k) : 0);
            if (x + 1 > j) break;
            if (!f(x + 1)) return false;
        }
        return true;
    }

    // Encoded payload: lower bits plus the unary upper half, without select directories.
    std::uint64_t payload_bits() const { return m_ == 0 ? 0 : m_ * low_bits_ + upper_.size(); }

    std::uint64_t size_in_bits() const { return (m_ ? low_.size_in_bits() : 0) + upper_.size_in_bits() + 192; }

    void save(Writer& w) const {
        w.put_magic("RFQB", 1);
        w.put<std::uint8_t>('E');
        w.put(n_);
        w.put(m_);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(low_bits_));
        low_.save(w);
        upper_.save(w);
    }

    static SparseBitVector load(Reader& r) {
        r.expect_magic("RFQB", 1);
        if (r.get<std::uint8_t>() != 'E') throw FormatError("expected sparse bitvector");
        SparseBitVector s;
        s.n_ = r.get<std::uint64_t>();
        s.m_ = r.get<std::uint64_t>();
        s.low_bits_ = r.get<std::uint8_t>();
        s.low_ = PackedInts::load(r);
        s.upper_ = BitVector::load(r);
        if (s.m_ > s.n_ || s.upper_.ones() != s.m_ || (s.m_ && s.upper_.size() != s.upper_len()))
            throw FormatError("sparse bitvector shape mismatch");
        return s;
    }

    bool operator==(const SparseBitVector&) const = default;

   private:
    std::uint64_t upper_len() const { return m_ + ((n_ - 1) >> low_bits_) + 1; }

    std::uint64_t value_at(std::uint64_t k) const {
        std::uint64_t high = upper_.select1(k + 1) - 1 - k;
        return ((high << low_bits_) | (low_bits_ ? low_.get(k) : 0)) + 1;
    }

    std::uint64_t n_ = 0;
    std::uint64_t m_ = 0;
    unsigned low_bits_ = 0;
    PackedInts low_;
    BitVector upper_;
};

}  // namespace rfq
