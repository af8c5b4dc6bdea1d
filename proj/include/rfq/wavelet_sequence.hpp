#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <variant>
#include <vector>

#include "bit_vector.hpp"
#include "common.hpp"
#include "compact_bits.hpp"
#include "digit_sequence.hpp"
#include "packed_ints.hpp"
#include "serialize.hpp"
#include "sparse_bit_vector.hpp"

namespace rfq {

struct SequenceOptions {
    enum class Mode : std::uint8_t { plain = 0, compressed = 1 };
    Mode mode = Mode::plain;
    unsigned arity = 2;  // plain mode only; a power of two up to 64
};

// Wavelet tree over S[1..n] with symbols in [1..sigma].
//
// plain: balanced levelwise tree of the given arity; each level is one bitvector (binary)
// or one digit array (multiary), node boundaries come from the cumulative symbol counts.
// compressed: Huffman-shaped binary tree; each node keeps whichever bitvector encoding
// is smallest for its bits.
class WaveletSequence {
   public:
    WaveletSequence() = default;

    WaveletSequence(const std::vector<std::uint32_t>& s, std::uint32_t sigma = 0, SequenceOptions opt = {})
        : n_(s.size()), opt_(opt) {
        for (auto a : s) {
            if (a == 0) throw DomainError("symbols are 1-based; found 0");
            sigma = std::max(sigma, a);
        }
        if (sigma == 0) sigma = 1;
        sigma_ = sigma;
        if (opt_.arity < 2 || opt_.arity > 64 || !std::has_single_bit(opt_.arity))
            throw ConfigError("arity must be a power of two in [2..64]");
        std::vector<std::uint64_t> counts(sigma_, 0);
        for (auto a : s) ++counts[a - 1];
        // symbol a closes with a one after its n_a zeros: cum(a) = select1(a) - a
        std::vector<std::uint64_t> closes(sigma_);
        std::uint64_t at = 0;
        for (std::uint32_t a = 0; a < sigma_; ++a) {
            at += counts[a];
            closes[a] = at++;
        }
        bounds_ = CompactBits(BitVector::from_indices(n_ + sigma_, closes));
        std::uint32_t distinct = 0, only = 1;
        for (std::uint32_t a = 0; a < sigma_; ++a)
            if (counts[a]) ++distinct, only = a + 1;
        if (distinct <= 1) rep_ = Unary{only};
        else if (opt_.mode == SequenceOptions::Mode::plain) rep_ = build_levels(s);
        else rep_ = build_huffman(s, counts);
    }

    std::uint64_t size() const { return n_; }
    std::uint32_t sigma() const { return sigma_; }
    const SequenceOptions& options() const { return opt_; }

    std::uint64_t count(std::uint32_t a) const {
        check_symbol(a);
        return symbol_count(a);
    }

    double entropy_h0() const {
        double h = 0;
        for (std::uint32_t a = 0; a < sigma_; ++a) {
            double c = static_cast<double>(symbol_count(a + 1));
            if (c > 0) h += c / n_ * std::log2(static_cast<double>(n_) / c);
        }
        return h;
    }

    std::uint32_t access(std::uint64_t k) const { return access_rank(k).first; }

    // S[k] together with rank_{S[k]}(S, k), from a single root-to-leaf walk
    std::pair<std::uint32_t, std::uint64_t> access_rank(std::uint64_t k) const {
        check_position(k);
        return std::visit([&](const auto& r) { return walk_access(r, k - 1); }, rep_);
    }

    std::uint64_t partial_rank(std::uint64_t k) const { return access_rank(k).second; }

    std::uint64_t rank(std::uint32_t a, std::uint64_t k) const {
        check_symbol(a);
        if (k > n_) throw RangeError("rank position " + std::to_string(k) + " beyond n=" + std::to_string(n_));
        if (k == 0) return 0;
        std::uint64_t total = symbol_count(a);
        if (total == 0 || k == n_) return total;
        return std::visit([&](const auto& r) { return walk_rank(r, a, k); }, rep_);
    }

    std::optional<std::uint64_t> select(std::uint32_t a, std::uint64_t r) const {
        check_symbol(a);
        if (r == 0) throw DomainError("select rank must be at least 1");
        if (r > symbol_count(a)) return std::nullopt;
        return std::visit([&](const auto& rep) { return walk_select(rep, a, r); }, rep_);
    }

    // position of the previous occurrence of S[k], or 0
    std::uint64_t c_value(std::uint64_t k) const {
        auto [a, r] = access_rank(k);
        return r == 1 ? 0 : *select(a, r - 1);
    }

    std::vector<std::uint32_t> extract(std::uint64_t i, std::uint64_t j) const {
        if (i == 0 || i > j + 1 || j > n_) throw RangeError("extract range invalid");
        std::vector<std::uint32_t> out;
        out.reserve(j + 1 - i);
        for (std::uint64_t k = i; k <= j; ++k) out.push_back(access(k));
        return out;
    }

    std::uint64_t size_in_bits() const {
        std::uint64_t total = 256 + bounds_.size_in_bits();
        if (auto* lv = std::get_if<Levels>(&rep_)) {
            for (const auto& l : lv->levels) total += l.size_in_bits();
        } else if (auto* h = std::get_if<Huffman>(&rep_)) {
            for (const auto& nd : h->nodes) total += nd.bits.size_in_bits() + 128;
            total += h->code.size_in_bits() + h->len.size_in_bits();
        }
        return total;
    }

    void save(Writer& w) const {
        w.put<std::uint64_t>(n_);
        w.put<std::uint32_t>(sigma_);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(opt_.mode));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(opt_.arity));
        bounds_.save(w);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(rep_.index()));
        if (auto* u = std::get_if<Unary>(&rep_)) w.put(u->symbol);
        if (auto* lv = std::get_if<Levels>(&rep_)) {
            w.put<std::uint8_t>(static_cast<std::uint8_t>(lv->code_bits));
            w.put<std::uint32_t>(static_cast<std::uint32_t>(lv->levels.size()));
            for (const auto& l : lv->levels) l.save(w);
        }
        if (auto* h = std::get_if<Huffman>(&rep_)) {
            w.put<std::uint32_t>(static_cast<std::uint32_t>(h->nodes.size()));
            for (const auto& nd : h->nodes) {
                w.put(nd.child[0]);
                w.put(nd.child[1]);
                nd.bits.save(w);
            }
            h->code.save(w);
            h->len.save(w);
        }
    }

    static WaveletSequence load(Reader& r) {
        WaveletSequence s;
        s.n_ = r.get<std::uint64_t>();
        s.sigma_ = r.get<std::uint32_t>();
        s.opt_.mode = static_cast<SequenceOptions::Mode>(r.get<std::uint8_t>());
        s.opt_.arity = r.get<std::uint8_t>();
        s.bounds_ = CompactBits::load(r);
        if (s.sigma_ == 0 || s.bounds_.size() != s.n_ + s.sigma_ || s.bounds_.ones() != s.sigma_)
            throw FormatError("sequence header mismatch");
        switch (r.get<std::uint8_t>()) {
            case 0: s.rep_ = Unary{r.get<std::uint32_t>()}; break;
            case 1: {
                Levels lv;
                lv.code_bits = r.get<std::uint8_t>();
                auto count = r.get<std::uint32_t>();
                if (count > 64) throw FormatError("level count");
                for (std::uint32_t k = 0; k < count; ++k) lv.levels.push_back(Level::load(r));
                s.rep_ = std::move(lv);
                break;
            }
            case 2: {
                Huffman h;
                auto count = r.get<std::uint32_t>();
                if (count >= s.sigma_) throw FormatError("node count");
                for (std::uint32_t k = 0; k < count; ++k) {
                    Node nd;
                    nd.child[0] = r.get<std::int64_t>();
                    nd.child[1] = r.get<std::int64_t>();
                    nd.bits = CompactBits::load(r);
                    h.nodes.push_back(std::move(nd));
                }
                h.code = PackedInts::load(r);
                h.len = PackedInts::load(r);
                s.rep_ = std::move(h);
                break;
            }
            default: throw FormatError("unknown sequence layout");
        }
        return s;
    }

    bool operator==(const WaveletSequence& o) const {
        Writer a, b;
        save(a);
        o.save(b);
        return a.bytes() == b.bytes();
    }

   private:
    struct Unary {
        std::uint32_t symbol;
    };

    // one level of the levelwise tree: bits (width 1) or digits (width > 1)
    struct Level {
        unsigned width = 1;
        BitVector bv;
        DigitSequence ds;

        unsigned digit(std::uint64_t idx) const { return width == 1 ? bv[idx] : ds[idx]; }
        std::uint64_t rank(unsigned d, std::uint64_t p) const {
            if (width == 1) return d ? bv.rank1_unchecked(p) : p - bv.rank1_unchecked(p);
            return ds.rank(d, p);
        }
        std::uint64_t select(unsigned d, std::uint64_t r) const {
            if (width == 1) return d ? bv.select1(r) : bv.select0(r);
            return ds.select(d, r);
        }
        std::uint64_t size_in_bits() const { return width == 1 ? bv.size_in_bits() : ds.size_in_bits(); }
        void save(Writer& w) const {
            w.put<std::uint8_t>(static_cast<std::uint8_t>(width));
            if (width == 1) bv.save(w);
            else ds.save(w);
        }
        static Level load(Reader& r) {
            Level l;
            l.width = r.get<std::uint8_t>();
            if (l.width == 1) l.bv = BitVector::load(r);
            else l.ds = DigitSequence::load(r);
            return l;
        }
    };

    struct Levels {
        unsigned code_bits = 0;  // L = ceil(lg sigma)
        std::vector<Level> levels;
    };

    struct Node {
        std::int64_t child[2] = {0, 0};  // >= 0: node index; < 0: -(symbol)
        CompactBits bits;
    };

    struct Huffman {
        std::vector<Node> nodes;  // root is node 0
        PackedInts code;          // per symbol, MSB-first branch bits
        PackedInts len;           // per symbol, 0 if absent
    };

    void check_position(std::uint64_t k) const {
        if (k == 0 || k > n_) throw RangeError("position " + std::to_string(k) + " outside [1.." + std::to_string(n_) + "]");
    }

    void check_symbol(std::uint32_t a) const {
        if (a == 0 || a > sigma_) throw DomainError("symbol " + std::to_string(a) + " outside [1.." + std::to_string(sigma_) + "]");
    }

    // ---- levelwise tree ----

    // consumed bits before level l and width of level l
    std::pair<unsigned, unsigned> level_span(const Levels& lv, std::size_t l) const {
        unsigned c = static_cast<unsigned>(std::countr_zero(opt_.arity));
        unsigned first = lv.code_bits - c * static_cast<unsigned>(lv.levels.size() - 1);
        if (l == 0) return {0, first};
        return {first + c * static_cast<unsigned>(l - 1), c};
    }

    // number of occurrences of symbols below x + 1, for x in [0..sigma]
    std::uint64_t cum(std::uint64_t x) const { return x == 0 ? 0 : bounds_.select1(x) - x; }

    std::uint64_t symbol_count(std::uint32_t a) const { return cum(a) - cum(a - 1); }

    std::uint64_t node_start(const Levels& lv, std::uint64_t prefix, unsigned consumed) const {
        std::uint64_t code = prefix << (lv.code_bits - consumed);
        return cum(std::min<std::uint64_t>(code, sigma_));
    }

    Levels build_levels(const std::vector<std::uint32_t>& s) const {
        Levels lv;
        lv.code_bits = bits::ceil_log2(sigma_);
        unsigned c = static_cast<unsigned>(std::countr_zero(opt_.arity));
        std::size_t count = bits::ceil_div(lv.code_bits, c);
        lv.levels.resize(count);
        std::vector<std::uint32_t> cur(s.size()), next(s.size());
        for (std::size_t k = 0; k < s.size(); ++k) cur[k] = s[k] - 1;
        for (std::size_t l = 0; l < count; ++l) {
            auto [consumed, width] = level_span(lv, l);
            unsigned shift = lv.code_bits - consumed - width;
            Level& level = lv.levels[l];
            level.width = width;
            if (width == 1) {
                std::vector<std::uint64_t> words(bits::ceil_div(s.size(), 64) + 1, 0);
                for (std::size_t k = 0; k < cur.size(); ++k)
                    if ((cur[k] >> shift) & 1) words[k / 64] |= 1ULL << (k % 64);
                level.bv = BitVector(std::move(words), s.size());
            } else {
                std::vector<std::uint8_t> digits(cur.size());
                for (std::size_t k = 0; k < cur.size(); ++k) digits[k] = static_cast<std::uint8_t>((cur[k] >> shift) & bits::low_mask(width));
                level.ds = DigitSequence(digits, width);
            }
            if (l + 1 == count) break;
            // stable counting sort by the prefix that includes this level's digit
            std::uint64_t keys = 1ULL << (consumed + width);
            std::vector<std::uint64_t> start(keys + 1, 0);
            for (auto x : cur) ++start[(x >> shift) + 1];
            for (std::uint64_t k = 0; k < keys; ++k) start[k + 1] += start[k];
            for (auto x : cur) next[start[x >> shift]++] = x;
            cur.swap(next);
        }
        return lv;
    }

    std::pair<std::uint32_t, std::uint64_t> walk_access(const Unary& u, std::uint64_t idx) const { return {u.symbol, idx + 1}; }

    std::pair<std::uint32_t, std::uint64_t> walk_access(const Levels& lv, std::uint64_t idx) const {
        std::uint64_t prefix = 0, p = idx;
        for (std::size_t l = 0; l < lv.levels.size(); ++l) {
            auto [consumed, width] = level_span(lv, l);
            std::uint64_t st = node_start(lv, prefix, consumed);
            const Level& level = lv.levels[l];
            unsigned d = level.digit(st + p);
            p = level.rank(d, st + p) - level.rank(d, st);
            prefix = (prefix << width) | d;
        }
        return {static_cast<std::uint32_t>(prefix + 1), p + 1};
    }

    std::uint64_t walk_rank(const Unary&, std::uint32_t, std::uint64_t k) const { return k; }

    std::uint64_t walk_rank(const Levels& lv, std::uint32_t a, std::uint64_t k) const {
        std::uint64_t code = a - 1, p = k;
        for (std::size_t l = 0; l < lv.levels.size() && p; ++l) {
            auto [consumed, width] = level_span(lv, l);
            std::uint64_t st = node_start(lv, code >> (lv.code_bits - consumed), consumed);
            unsigned d = static_cast<unsigned>((code >> (lv.code_bits - consumed - width)) & bits::low_mask(width));
            const Level& level = lv.levels[l];
            p = level.rank(d, st + p) - level.rank(d, st);
        }
        return p;
    }

    std::uint64_t walk_select(const Unary&, std::uint32_t, std::uint64_t r) const { return r; }

    std::uint64_t walk_select(const Levels& lv, std::uint32_t a, std::uint64_t r) const {
        std::uint64_t code = a - 1, p = r - 1;
        for (std::size_t l = lv.levels.size(); l-- > 0;) {
            auto [consumed, width] = level_span(lv, l);
            std::uint64_t st = node_start(lv, code >> (lv.code_bits - consumed), consumed);
            unsigned d = static_cast<unsigned>((code >> (lv.code_bits - consumed - width)) & bits::low_mask(width));
            const Level& level = lv.levels[l];
            p = level.select(d, level.rank(d, st) + p + 1) - 1 - st;
        }
        return p + 1;
    }

    // ---- Huffman-shaped tree ----

    Huffman build_huffman(const std::vector<std::uint32_t>& s, const std::vector<std::uint64_t>& counts) const {
        std::vector<std::uint32_t> present;
        for (std::uint32_t a = 0; a < sigma_; ++a)
            if (counts[a]) present.push_back(a + 1);
        std::vector<std::uint64_t> code(sigma_, 0), len(sigma_, 0);
        // merge tree: leaves 0..m-1 are present symbols, internal ids follow
        std::size_t m = present.size();
        std::vector<std::int64_t> parent(2 * m - 1, -1);
        std::vector<std::uint8_t> side(2 * m - 1, 0);
        using Item = std::pair<std::uint64_t, std::int64_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        for (std::size_t k = 0; k < m; ++k) pq.emplace(counts[present[k] - 1], static_cast<std::int64_t>(k));
        std::int64_t next_id = static_cast<std::int64_t>(m);
        while (pq.size() > 1) {
            auto [w0, x0] = pq.top();
            pq.pop();
            auto [w1, x1] = pq.top();
            pq.pop();
            parent[x0] = parent[x1] = next_id;
            side[x1] = 1;
            pq.emplace(w0 + w1, next_id++);
        }
        for (std::size_t k = 0; k < m; ++k) {
            std::uint64_t c = 0, depth = 0;
            for (std::int64_t x = static_cast<std::int64_t>(k); parent[x] >= 0; x = parent[x]) {
                if (depth == 63) throw ConfigError("symbol distribution too skewed for a 64-bit code");
                c |= static_cast<std::uint64_t>(side[x]) << depth++;
            }
            code[present[k] - 1] = c;
            len[present[k] - 1] = depth;
        }
        Huffman h;
        h.code = PackedInts::from(code);
        h.len = PackedInts::from(len);
        std::vector<std::uint32_t> seq(s.begin(), s.end());
        build_node(h, seq, 0);
        return h;
    }

    // builds the node for all symbols sharing the first `depth` code bits; returns its id
    std::int64_t build_node(Huffman& h, std::vector<std::uint32_t>& seq, unsigned depth) const {
        std::int64_t id = static_cast<std::int64_t>(h.nodes.size());
        h.nodes.emplace_back();
        std::vector<std::uint64_t> words(bits::ceil_div(seq.size(), 64) + 1, 0);
        std::vector<std::uint32_t> side[2];
        for (std::size_t k = 0; k < seq.size(); ++k) {
            std::uint32_t a = seq[k];
            unsigned b = static_cast<unsigned>((h.code.get(a - 1) >> (h.len.get(a - 1) - 1 - depth)) & 1);
            if (b) words[k / 64] |= 1ULL << (k % 64);
            side[b].push_back(a);
        }
        std::uint64_t size = seq.size();
        std::vector<std::uint32_t>().swap(seq);
        h.nodes[id].bits = CompactBits(BitVector(std::move(words), size), true);
        for (unsigned b = 0; b < 2; ++b) {
            std::uint32_t first = side[b].front();
            std::int64_t child;
            if (h.len.get(first - 1) == depth + 1) child = -static_cast<std::int64_t>(first);
            else child = build_node(h, side[b], depth + 1);
            h.nodes[id].child[b] = child;
        }
        return id;
    }

    std::pair<std::uint32_t, std::uint64_t> walk_access(const Huffman& h, std::uint64_t idx) const {
        std::int64_t node = 0;
        std::uint64_t p = idx;
        for (;;) {
            const Node& nd = h.nodes[node];
            unsigned b = nd.bits[p];
            p = b ? nd.bits.rank1(p) : nd.bits.rank0(p);
            node = nd.child[b];
            if (node < 0) return {static_cast<std::uint32_t>(-node), p + 1};
        }
    }

    std::uint64_t walk_rank(const Huffman& h, std::uint32_t a, std::uint64_t k) const {
        std::uint64_t code = h.code.get(a - 1);
        unsigned len = static_cast<unsigned>(h.len.get(a - 1));
        std::int64_t node = 0;
        std::uint64_t p = k;
        for (unsigned d = 0; d < len && p; ++d) {
            const Node& nd = h.nodes[node];
            unsigned b = (code >> (len - 1 - d)) & 1;
            p = b ? nd.bits.rank1(p) : nd.bits.rank0(p);
            node = nd.child[b];
        }
        return p;
    }

    std::uint64_t walk_select(const Huffman& h, std::uint32_t a, std::uint64_t r) const {
        std::uint64_t code = h.code.get(a - 1);
        unsigned len = static_cast<unsigned>(h.len.get(a - 1));
        std::int64_t path[64];
        std::int64_t node = 0;
        for (unsigned d = 0; d < len; ++d) {
            path[d] = node;
            node = h.nodes[node].child[(code >> (len - 1 - d)) & 1];
        }
        std::uint64_t p = r;
        for (unsigned d = len; d-- > 0;) {
            const Node& nd = h.nodes[path[d]];
            p = ((code >> (len - 1 - d)) & 1) ? nd.bits.select1(p) : nd.bits.select0(p);
        }
        return p;
    }

    std::uint64_t n_ = 0;
    std::uint32_t sigma_ = 1;
    SequenceOptions opt_;
    CompactBits bounds_;
    std::variant<Unary, Levels, Huffman> rep_;
};

}  // namespace rfq
