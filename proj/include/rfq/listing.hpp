#pragma once

#include <cstdint>
#include <limits>
#include <unordered_set>
#include <vector>

#include "common.hpp"
#include "packed_ints.hpp"
#include "rmq.hpp"
#include "serialize.hpp"
#include "wavelet_sequence.hpp"

namespace rfq {

struct Listed {
    std::uint32_t symbol;
    std::uint64_t position;
    bool operator==(const Listed&) const = default;
};

// C array cells of the indexed sequence, read implicitly: C[k] = select(S[k], partial_rank(k) - 1).
class SequenceCells {
   public:
    SequenceCells(const WaveletSequence& seq, QueryStats& st) : seq_(&seq), st_(&st) {}

    std::uint64_t size() const { return seq_->size(); }

    std::uint64_t c_value(std::uint64_t k) {
        ++st_->c_probes;
        ++st_->partial_ranks;
        auto [a, r] = seq_->access_rank(k);
        remember(k, a);
        if (r == 1) return 0;
        ++st_->selects;
        return *seq_->select(a, r - 1);
    }

    std::uint32_t symbol(std::uint64_t k) {
        for (auto& c : cache_)
            if (c.first == k) return c.second;
        ++st_->accesses;
        auto a = seq_->access(k);
        remember(k, a);
        return a;
    }

   private:
    void remember(std::uint64_t k, std::uint32_t a) {
        cache_[slot_] = {k, a};
        slot_ ^= 1;
    }

    const WaveletSequence* seq_;
    QueryStats* st_;
    std::pair<std::uint64_t, std::uint32_t> cache_[2] = {{0, 0}, {0, 0}};
    unsigned slot_ = 0;
};

// Cells held explicitly: symbols and previous-occurrence links of some sequence.
class ExplicitCells {
   public:
    ExplicitCells(const PackedInts& symbols, const PackedInts& prev, QueryStats& st)
        : symbols_(&symbols), prev_(&prev), st_(&st) {}

    std::uint64_t size() const { return symbols_->size(); }
    std::uint64_t c_value(std::uint64_t k) {
        ++st_->c_probes;
        return prev_->get(k - 1);
    }
    std::uint32_t symbol(std::uint64_t k) { return static_cast<std::uint32_t>(symbols_->get(k - 1)); }

   private:
    const PackedInts* symbols_;
    const PackedInts* prev_;
    QueryStats* st_;
};

// Colored range listing: distinct symbols of a range with their leftmost positions.
//
// full: RMQ over every cell of C; the cells themselves are read through the Cells object.
// sparsified: RMQ over C'[b] = min of C over block b of g cells; blocks whose minimum is
// below i are scanned cell by cell, skipping symbols already reported.
class ListingIndex {
   public:
    enum class Mode : std::uint8_t { full = 0, sparsified = 1 };

    ListingIndex() = default;

    // c: C[1..n] stored 0-based. rmq_block only applies to full mode.
    static ListingIndex full(const std::vector<std::uint64_t>& c, std::uint64_t rmq_block = 1) {
        ListingIndex x;
        x.mode_ = Mode::full;
        x.n_ = c.size();
        x.g_ = 1;
        x.rmq_ = RmqIndex(c.size(), [&](std::uint64_t k) { return c[k]; }, rmq_block);
        return x;
    }

    static ListingIndex sparsified(const std::vector<std::uint64_t>& c, std::uint64_t g) {
        if (g == 0) throw ConfigError("listing block length must be positive");
        ListingIndex x;
        x.mode_ = Mode::sparsified;
        x.n_ = c.size();
        x.g_ = g;
        std::vector<std::uint64_t> mins(bits::ceil_div(c.size(), g), std::numeric_limits<std::uint64_t>::max());
        for (std::uint64_t k = 0; k < c.size(); ++k) mins[k / g] = std::min(mins[k / g], c[k]);
        x.cprime_ = PackedInts::from(mins);
        x.rmq_ = RmqIndex(mins.size(), [&](std::uint64_t b) { return mins[b]; }, mins.size() > 256 ? 32 : 1);
        return x;
    }

    Mode mode() const { return mode_; }
    std::uint64_t block_len() const { return g_; }
    std::uint64_t size() const { return n_; }
    std::uint64_t blocks() const { return cprime_.size(); }
    std::uint64_t block_min(std::uint64_t b) const { return cprime_.get(b); }

    // Calls visit(symbol, leftmost_position) for each distinct symbol of [i..j] until it
    // returns false. Full mode reports in pre-order (minimum, left part, right part);
    // sparsified mode reports blocks left to right.
    template <class Cells, class Visit>
    void for_each_distinct(Cells& cells, std::uint64_t i, std::uint64_t j, QueryStats& st, Visit&& visit) const {
        if (i == 0 || i > j || j > n_)
            throw RangeError("listing range [" + std::to_string(i) + ".." + std::to_string(j) + "] outside [1.." + std::to_string(n_) + "]");
        if (mode_ == Mode::full) list_full(cells, i, j, st, visit);
        else list_sparse(cells, i, j, st, visit);
    }

    template <class Cells>
    std::vector<Listed> list(Cells& cells, std::uint64_t i, std::uint64_t j, std::uint64_t limit, QueryStats& st) const {
        if (limit == 0) throw DomainError("listing limit must be at least 1");
        std::vector<Listed> out;
        for_each_distinct(cells, i, j, st, [&](std::uint32_t a, std::uint64_t p) {
            out.push_back({a, p});
            return out.size() < limit;
        });
        return out;
    }

    std::uint64_t size_in_bits() const { return 192 + cprime_.size_in_bits() + rmq_.size_in_bits(); }

    void save(Writer& w) const {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(mode_));
        w.put(n_);
        w.put(g_);
        cprime_.save(w);
        rmq_.save(w);
    }

    static ListingIndex load(Reader& r) {
        ListingIndex x;
        auto mode = r.get<std::uint8_t>();
        if (mode > 1) throw FormatError("listing mode");
        x.mode_ = static_cast<Mode>(mode);
        x.n_ = r.get<std::uint64_t>();
        x.g_ = r.get<std::uint64_t>();
        x.cprime_ = PackedInts::load(r);
        x.rmq_ = RmqIndex::load(r);
        if (x.g_ == 0 || (x.mode_ == Mode::sparsified && x.cprime_.size() != bits::ceil_div(x.n_, x.g_)))
            throw FormatError("listing shape mismatch");
        return x;
    }

    bool operator==(const ListingIndex&) const = default;

   private:
    template <class Cells, class Visit>
    void list_full(Cells& cells, std::uint64_t i, std::uint64_t j, QueryStats& st, Visit& visit) const {
        auto value = [&](std::uint64_t idx) { return cells.c_value(idx + 1); };
        std::vector<std::pair<std::uint64_t, std::uint64_t>> stack{{i, j}};
        while (!stack.empty()) {
            auto [l, r] = stack.back();
            stack.pop_back();
            ++st.listing_steps;
            auto m = rmq_.argmin(l - 1, r - 1, value);
            if (m.value >= i) continue;
            std::uint64_t p = m.pos + 1;
            if (!visit(cells.symbol(p), p)) return;
            if (p < r) stack.emplace_back(p + 1, r);
            if (p > l) stack.emplace_back(l, p - 1);
        }
    }

    template <class Cells, class Visit>
    void list_sparse(Cells& cells, std::uint64_t i, std::uint64_t j, QueryStats& st, Visit& visit) const {
        auto value = [&](std::uint64_t b) { return cprime_.get(b); };
        constexpr std::uint64_t kMarker = std::uint64_t{1} << 63;
        std::unordered_set<std::uint32_t> reported;
        // entries: block range [l..r], or a single block b tagged with kMarker
        std::vector<std::pair<std::uint64_t, std::uint64_t>> stack{{(i - 1) / g_, (j - 1) / g_}};
        while (!stack.empty()) {
            auto [l, r] = stack.back();
            stack.pop_back();
            if (l & kMarker) {
                std::uint64_t b = l & ~kMarker;
                std::uint64_t from = std::max(i, b * g_ + 1), to = std::min(j, (b + 1) * g_);
                for (std::uint64_t k = from; k <= to; ++k) {
                    std::uint32_t a = cells.symbol(k);
                    if (reported.count(a)) continue;
                    if (cells.c_value(k) >= i) continue;
                    reported.insert(a);
                    if (!visit(a, k)) return;
                }
                continue;
            }
            ++st.listing_steps;
            auto q = rmq_.argmin(l, r, value);
            if (q.value >= i) continue;
            if (q.pos < r) stack.emplace_back(q.pos + 1, r);
            stack.emplace_back(q.pos | kMarker, 0);
            if (q.pos > l) stack.emplace_back(l, q.pos - 1);
        }
    }

    Mode mode_ = Mode::full;
    std::uint64_t n_ = 0;
    std::uint64_t g_ = 1;
    PackedInts cprime_;
    RmqIndex rmq_;
};

// C[1..n] of a raw sequence, 0-based storage
inline std::vector<std::uint64_t> previous_occurrences(const std::vector<std::uint32_t>& s, std::uint32_t sigma) {
    std::vector<std::uint64_t> last(static_cast<std::size_t>(sigma) + 1, 0), c(s.size());
    for (std::uint64_t k = 0; k < s.size(); ++k) {
        c[k] = last[s[k]];
        last[s[k]] = k + 1;
    }
    return c;
}

}  // namespace rfq
