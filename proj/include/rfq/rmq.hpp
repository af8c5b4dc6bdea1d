#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "common.hpp"
#include "packed_ints.hpp"
#include "serialize.hpp"

namespace rfq {

// Leftmost range-minimum over an array the caller owns. Values are read through an
// accessor `value(idx)` (0-based) both at build and at query time; nothing is copied.
//
// block == 1: sparse table of argmins over all cells, a query reads two cells.
// block  > 1: sparse table over per-block argmins plus in-block scans; cheaper in space,
// meant for arrays whose cells are cheap to read.
class RmqIndex {
   public:
    struct Min {
        std::uint64_t pos;  // 0-based
        std::uint64_t value;
    };

    RmqIndex() = default;

    template <class Access>
    RmqIndex(std::uint64_t n, Access&& value, std::uint64_t block = 1) : n_(n), block_(block == 0 ? 1 : block) {
        if (n_ == 0) return;
        std::uint64_t nb = bits::ceil_div(n_, block_);
        const unsigned pw = bits::width_for(n_ - 1);
        std::vector<std::uint64_t> base(nb), base_val(nb);
        for (std::uint64_t b = 0; b < nb; ++b) {
            std::uint64_t best = b * block_, best_val = value(best);
            for (std::uint64_t k = best + 1; k < std::min(n_, (b + 1) * block_); ++k) {
                std::uint64_t v = value(k);
                if (v < best_val) best = k, best_val = v;
            }
            base[b] = best;
            base_val[b] = best_val;
        }
        if (block_ > 1) block_min_ = PackedInts::from(base);
        std::vector<std::uint64_t> prev = base, prev_val = base_val;
        for (unsigned lvl = 1; (1ULL << lvl) <= nb; ++lvl) {
            std::uint64_t len = nb - (1ULL << lvl) + 1, half = 1ULL << (lvl - 1);
            PackedInts table(len, pw);
            std::vector<std::uint64_t> cur(len), cur_val(len);
            for (std::uint64_t s = 0; s < len; ++s) {
                bool right = prev_val[s + half] < prev_val[s];
                cur[s] = right ? prev[s + half] : prev[s];
                cur_val[s] = right ? prev_val[s + half] : prev_val[s];
                table.set(s, cur[s]);
            }
            levels_.push_back(std::move(table));
            prev.swap(cur);
            prev_val.swap(cur_val);
        }
    }

    std::uint64_t size() const { return n_; }
    std::uint64_t block() const { return block_; }

    // leftmost minimum over [l..r], 0-based inclusive
    template <class Access>
    Min argmin(std::uint64_t l, std::uint64_t r, Access&& value) const {
        if (l > r || r >= n_) throw RangeError("rmq range [" + std::to_string(l) + ".." + std::to_string(r) + "] invalid");
        if (block_ == 1) return table_min(l, r, value);
        std::uint64_t bl = l / block_, br = r / block_;
        if (bl == br) return scan(l, r, value);
        Min best = scan(l, (bl + 1) * block_ - 1, value);
        if (bl + 1 < br) take(best, table_min(bl + 1, br - 1, value));
        take(best, scan(br * block_, r, value));
        return best;
    }

    std::uint64_t size_in_bits() const {
        std::uint64_t total = 128 + block_min_.size_in_bits();
        for (const auto& t : levels_) total += t.size_in_bits();
        return total;
    }

    void save(Writer& w) const {
        w.put_magic("RFQB", 1);
        w.put<std::uint8_t>('R');
        w.put(n_);
        w.put(block_);
        block_min_.save(w);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(levels_.size()));
        for (const auto& t : levels_) t.save(w);
    }

    static RmqIndex load(Reader& r) {
        r.expect_magic("RFQB", 1);
        if (r.get<std::uint8_t>() != 'R') throw FormatError("expected rmq index");
        RmqIndex q;
        q.n_ = r.get<std::uint64_t>();
        q.block_ = r.get<std::uint64_t>();
        if (q.block_ == 0) throw FormatError("rmq block of zero");
        q.block_min_ = PackedInts::load(r);
        auto count = r.get<std::uint32_t>();
        if (count > 64) throw FormatError("rmq level count");
        for (std::uint32_t k = 0; k < count; ++k) q.levels_.push_back(PackedInts::load(r));
        return q;
    }

    bool operator==(const RmqIndex&) const = default;

   private:
    static void take(Min& best, const Min& other) {
        if (other.value < best.value) best = other;
    }

    template <class Access>
    Min scan(std::uint64_t l, std::uint64_t r, Access& value) const {
        Min best{l, value(l)};
        for (std::uint64_t k = l + 1; k <= r; ++k) {
            std::uint64_t v = value(k);
            if (v < best.value) best = {k, v};
        }
        return best;
    }

    // cell position of the base argmin of unit u (a cell when block_ == 1, else a block)
    std::uint64_t base_pos(std::uint64_t u) const { return block_ == 1 ? u : block_min_.get(u); }

    std::uint64_t level_pos(unsigned lvl, std::uint64_t s) const {
        return lvl == 0 ? base_pos(s) : levels_[lvl - 1].get(s);
    }

    template <class Access>
    Min table_min(std::uint64_t l, std::uint64_t r, Access& value) const {
        unsigned lvl = bits::floor_log2(r - l + 1);
        std::uint64_t a = level_pos(lvl, l);
        std::uint64_t b = level_pos(lvl, r - (1ULL << lvl) + 1);
        std::uint64_t va = value(a);
        if (a == b) return {a, va};
        std::uint64_t vb = value(b);
        return vb < va ? Min{b, vb} : Min{a, va};
    }

    std::uint64_t n_ = 0;
    std::uint64_t block_ = 1;
    PackedInts block_min_;
    std::vector<PackedInts> levels_;
};

// 1-based convenience wrapper: position of the leftmost minimum of values[l..r].
template <class Access>
std::uint64_t rmq_leftmost_min(const RmqIndex& rmq, Access&& value_1based, std::uint64_t l, std::uint64_t r) {
    if (l == 0 || l > r || r > rmq.size()) throw RangeError("rmq range [" + std::to_string(l) + ".." + std::to_string(r) + "] invalid");
    auto at = [&](std::uint64_t idx) -> std::uint64_t { return value_1based(idx + 1); };
    return rmq.argmin(l - 1, r - 1, at).pos + 1;
}

}  // namespace rfq
