#pragma once

#include <cstdint>
#include <variant>

#include "bit_vector.hpp"
#include "sparse_bit_vector.hpp"

namespace rfq {

// Bitvector that stores whichever is smallest: the plain bits, Elias-Fano over the ones,
// or Elias-Fano over the zeros. Used for flag families and compressed wavelet nodes.
class CompactBits {
   public:
    enum class Kind : std::uint8_t { plain = 0, sparse_ones = 1, sparse_zeros = 2 };

    CompactBits() = default;

    explicit CompactBits(const BitVector& bv, bool allow_sparse = true) {
        rep_ = bv;
        if (!allow_sparse || bv.size() == 0) return;
        auto ones = SparseBitVector::from_bits(bv);
        std::uint64_t best = bv.size_in_bits();
        if (ones.size_in_bits() < best) {
            best = ones.size_in_bits();
            rep_ = std::move(ones);
        }
        if (bv.zeros() < bv.ones()) {
            std::vector<std::uint64_t> zero_pos;
            zero_pos.reserve(bv.zeros());
            for (std::uint64_t k = 0; k < bv.size(); ++k)
                if (!bv[k]) zero_pos.push_back(k + 1);
            SparseBitVector zeros(bv.size(), zero_pos);
            if (zeros.size_in_bits() < best) rep_ = Complement{std::move(zeros)};
        }
    }

    Kind kind() const { return static_cast<Kind>(rep_.index()); }

    std::uint64_t size() const {
        return std::visit([](const auto& b) { return inner(b).size(); }, rep_);
    }

    std::uint64_t ones() const {
        if (auto* c = std::get_if<Complement>(&rep_)) return c->bits.zeros();
        return std::visit([](const auto& b) { return inner(b).ones(); }, rep_);
    }

    std::uint64_t zeros() const { return size() - ones(); }

    bool operator[](std::uint64_t idx) const {
        if (auto* c = std::get_if<Complement>(&rep_)) return !c->bits[idx];
        return std::visit([&](const auto& b) { return inner(b)[idx]; }, rep_);
    }

    std::uint64_t rank1(std::uint64_t p) const {
        if (auto* c = std::get_if<Complement>(&rep_)) return c->bits.rank0(p);
        return std::visit([&](const auto& b) { return inner(b).rank1(p); }, rep_);
    }

    std::uint64_t rank0(std::uint64_t p) const { return p - rank1(p); }

    std::uint64_t select1(std::uint64_t r) const {
        if (auto* c = std::get_if<Complement>(&rep_)) return c->bits.select0(r);
        return std::visit([&](const auto& b) { return inner(b).select1(r); }, rep_);
    }

    std::uint64_t select0(std::uint64_t r) const {
        if (auto* c = std::get_if<Complement>(&rep_)) return c->bits.select1(r);
        return std::visit([&](const auto& b) { return inner(b).select0(r); }, rep_);
    }

    template <class F>
    bool for_each_one(std::uint64_t i, std::uint64_t j, F&& f) const {
        if (auto* c = std::get_if<Complement>(&rep_)) {
            if (i == 0 || j > c->bits.size()) throw RangeError("bitvector range out of bounds");
            std::uint64_t next = i;
            bool go = c->bits.for_each_one(i, j, [&](std::uint64_t z) {
                for (; next < z; ++next)
                    if (!f(next)) return false;
                next = z + 1;
                return true;
            });
            if (!go) return false;
            for (; next <= j; ++next)
                if (!f(next)) return false;
            return true;
        }
        return std::visit([&](const auto& b) { return inner(b).for_each_one(i, j, f); }, rep_);
    }

    std::uint64_t size_in_bits() const {
        return 8 + std::visit([](const auto& b) { return inner(b).size_in_bits(); }, rep_);
    }

    void save(Writer& w) const {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(kind()));
        std::visit([&](const auto& b) { inner(b).save(w); }, rep_);
    }

    static CompactBits load(Reader& r) {
        CompactBits c;
        switch (static_cast<Kind>(r.get<std::uint8_t>())) {
            case Kind::plain: c.rep_ = BitVector::load(r); break;
            case Kind::sparse_ones: c.rep_ = SparseBitVector::load(r); break;
            case Kind::sparse_zeros: c.rep_ = Complement{SparseBitVector::load(r)}; break;
            default: throw FormatError("unknown bitvector kind");
        }
        return c;
    }

    bool operator==(const CompactBits&) const = default;

   private:
    struct Complement {
        SparseBitVector bits;
        bool operator==(const Complement&) const = default;
    };

    static const BitVector& inner(const BitVector& b) { return b; }
    static const SparseBitVector& inner(const SparseBitVector& b) { return b; }
    static const SparseBitVector& inner(const Complement& b) { return b.bits; }

    std::variant<BitVector, SparseBitVector, Complement> rep_;
};

}  // namespace rfq
