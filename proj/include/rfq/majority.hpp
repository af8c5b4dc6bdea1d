#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "compact_bits.hpp"
#include "listing.hpp"
#include "packed_ints.hpp"
#include "query_support.hpp"
#include "serialize.hpp"
#include "swar_kernel.hpp"
#include "wavelet_sequence.hpp"

namespace rfq {

struct MajorityConfig {
    std::uint64_t chunk_len = 1024;  // occurrences per chunk of the sampled families
    std::uint64_t trade = 1;         // g: raises the flagged-path cutoff to b >= t + lg g + 2
    Verify verify = Verify::rank;
    Dispatch dispatch = Dispatch::automatic;
    bool sampled_families = true;  // J families, required by check verification

    void validate() const {
        if (chunk_len == 0) throw ConfigError("chunk length must be positive");
        if (trade == 0) throw ConfigError("trade parameter must be positive");
        if (verify == Verify::check && !sampled_families) throw ConfigError("check verification needs the sampled families");
    }
};

struct Verdict {
    bool majority;
    std::uint64_t occ_at_least, occ_at_most;
};

// Majority index over a sequence it does not own. For every reachable (t, b) it keeps
//   G: per block of 2^(b-1), the leftmost and rightmost occurrence of each symbol that
//      occurs at least 2^(b-t) times within distance 2^(b+1);
//   J: every chunk_len-th occurrence of such symbols near a qualifying position, plus a
//      listing structure over the sampled subsequence.
class MajorityIndex {
   public:
    struct Family {
        CompactBits g;
        bool sampled = false;
        CompactBits j;
        PackedInts symbols, links;  // sampled subsequence and its previous-occurrence links
        ListingIndex listing;
        bool operator==(const Family&) const = default;
    };

    // below this length no families are built and every query scans
    static constexpr std::uint64_t kMinFamilies = 64;

    MajorityIndex() = default;

    MajorityIndex(const std::vector<std::uint32_t>& s, std::uint32_t sigma, MajorityConfig cfg = {})
        : cfg_(cfg), n_(s.size()), sigma_(sigma) {
        cfg_.validate();
        if (n_ < kMinFamilies) return;
        detail::Occurrences occ(s, sigma_);
        std::vector<std::uint32_t> window(n_);
        for (unsigned b = 1; b <= bits::floor_log2(n_); ++b) {
            window_counts(occ, b, window);
            for (unsigned t = 0; t <= max_t(); ++t) {
                if (b < b_lo(t)) continue;
                Family f;
                f.g = build_g(occ, window, t, b);
                if (cfg_.sampled_families) build_j(s, occ, window, t, b, f);
                check_bounds(f, t, b);
                families_.emplace(std::make_pair(t, b), std::move(f));
            }
        }
        if (n_ <= 512) verify_small(s);
    }

    const MajorityConfig& config() const { return cfg_; }
    std::uint64_t size() const { return n_; }
    const std::map<std::pair<unsigned, unsigned>, Family>& families() const { return families_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // lowest b answered through the flags for a given t
    unsigned b_lo(unsigned t) const {
        if (cfg_.dispatch == Dispatch::flagged) return std::max(1u, t);
        return std::max(1u, t + bits::ceil_log2(cfg_.trade) + 2);
    }

    Counted query(const WaveletSequence& seq, const ListingIndex* listing, std::uint64_t i, std::uint64_t j, double tau,
                  QueryStats& st, std::optional<Verify> verify = {}) const {
        auto p = QueryParams::make(i, j, tau, n_);
        Verify v = verify.value_or(cfg_.verify);
        if (v == Verify::check && !cfg_.sampled_families) throw ConfigError("check verification needs the sampled families");
        Counted out;
        if (p.threshold >= p.len) return out;  // tau = 1
        if (p.below_alphabet(sigma_)) out = all_symbols(seq, listing, p, st, v);
        else if (cfg_.dispatch == Dispatch::sequential || n_ < kMinFamilies || p.b < b_lo(p.t)) out = sequential(seq, p, st);
        else out = flagged(seq, p, st, v);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Short ranges. Tiny alphabets go through the word-parallel counters. Otherwise a
    // distinct-head scan; ranges longer than 4 ceil(1/tau) are cut into at most 32
    // segments, and since a majority of the range is a majority of some segment, only
    // segment majorities are checked against the whole range.
    static Counted sequential(const WaveletSequence& seq, const QueryParams& p, QueryStats& st) {
        Counted out;
        if (unsigned sp = swar_alphabet_for(seq.sigma(), p.len)) {
            for (auto [a, occ] : swar_band_counts(detail::shifted_extract(seq, p.i, p.j, st), sp, p.threshold + 1, Band::high)) {
                ++st.candidates;
                out.emplace_back(a + 1, occ);
            }
            return out;
        }
        std::uint64_t segments = std::clamp<std::uint64_t>(bits::ceil_div(p.len, 4 * p.distinct_cap()), 1, 32);
        if (segments == 1) {
            detail::scan_heads(seq, p.i, p.j, st, [&](std::uint32_t a, std::uint64_t, std::uint64_t occ, std::uint64_t remaining) {
                ++st.candidates;
                if (p.is_majority(occ)) out.emplace_back(a, occ);
                return remaining > p.threshold;
            });
            return out;
        }
        std::uint64_t seg = bits::ceil_div(p.len, segments);
        std::vector<std::uint32_t> cand;
        for (std::uint64_t l = p.i; l <= p.j; l += seg) {
            std::uint64_t r = std::min(p.j, l + seg - 1);
            double need = p.tau * static_cast<double>(r - l + 1);
            detail::scan_heads(seq, l, r, st, [&](std::uint32_t a, std::uint64_t, std::uint64_t occ, std::uint64_t remaining) {
                if (static_cast<double>(occ) >= need) cand.push_back(a);
                return static_cast<double>(remaining) >= need;
            });
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (auto a : cand) {
            ++st.candidates;
            auto occ = detail::range_count(seq, a, p.i, p.j, st);
            if (p.is_majority(occ)) out.emplace_back(a, occ);
        }
        return out;
    }

    // k must be the leftmost occurrence of a in [i..j]; one partial rank and one select
    static Verdict check_candidate(const WaveletSequence& seq, std::uint32_t a, std::uint64_t k, const QueryParams& p, QueryStats& st) {
        ++st.partial_ranks;
        auto [sym, r] = seq.access_rank(k);
        if (sym != a) throw DomainError("check position does not hold the candidate");
        if (detail::check_from_leftmost(seq, a, r, p, st)) return {true, p.threshold + 1, p.len};
        return {false, 1, p.threshold};
    }

    // Smallest occurrence of a at or after i inside the chunk holding anchor, or none when
    // i lies outside that chunk.
    std::optional<std::uint64_t> chunk_successor(const WaveletSequence& seq, std::uint32_t a, std::uint64_t anchor, std::uint64_t i,
                                                 QueryStats& st) const {
        auto hit = successor_in_chunk(seq, a, anchor, i, st);
        if (!hit) return std::nullopt;
        return hit->first;
    }

    // Geometric descent tau = 1/2, 1/4, ... until some tau-majority exists; the mode is the
    // most frequent of those. tau = 1 is skipped since nothing can exceed the range length.
    std::pair<std::uint32_t, std::uint64_t> mode(const WaveletSequence& seq, const ListingIndex* listing, std::uint64_t i, std::uint64_t j,
                                                 QueryStats& st) const {
        QueryParams::make(i, j, 1.0, n_);
        for (int e = 1;; ++e) {
            ++st.mode_iterations;
            auto found = query(seq, listing, i, j, std::ldexp(1.0, -e), st);
            if (found.empty()) continue;
            auto best = found.front();
            for (auto& x : found)
                if (x.second > best.second) best = x;
            return best;
        }
    }

    // Fault-injection hook for the verifier: clears the rightmost flag of G_b^t. Returns
    // false when that family is absent or has no flags.
    bool clear_last_flag(unsigned t, unsigned b) {
        auto it = families_.find({t, b});
        if (it == families_.end() || it->second.g.ones() == 0) return false;
        auto& g = it->second.g;
        std::vector<std::uint64_t> ones;
        g.for_each_one(1, n_, [&](std::uint64_t k) {
            ones.push_back(k - 1);
            return true;
        });
        ones.pop_back();
        g = CompactBits(BitVector::from_indices(n_, ones));
        return true;
    }

    std::uint64_t g_bits() const {
        std::uint64_t total = 0;
        for (auto& [key, f] : families_) total += f.g.size_in_bits();
        return total;
    }

    std::uint64_t j_bits() const {
        std::uint64_t total = 0;
        for (auto& [key, f] : families_)
            if (f.sampled) total += f.j.size_in_bits() + f.symbols.size_in_bits() + f.links.size_in_bits() + f.listing.size_in_bits();
        return total;
    }

    std::uint64_t size_in_bits() const { return 256 + g_bits() + j_bits(); }

    void save(Writer& w) const {
        w.put(cfg_.chunk_len);
        w.put(cfg_.trade);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.verify));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.dispatch));
        w.put<std::uint8_t>(cfg_.sampled_families);
        w.put(n_);
        w.put(sigma_);
        w.put<std::uint64_t>(families_.size());
        for (auto& [key, f] : families_) {
            w.put<std::uint8_t>(static_cast<std::uint8_t>(key.first));
            w.put<std::uint8_t>(static_cast<std::uint8_t>(key.second));
            f.g.save(w);
            w.put<std::uint8_t>(f.sampled);
            if (!f.sampled) continue;
            f.j.save(w);
            f.symbols.save(w);
            f.links.save(w);
            f.listing.save(w);
        }
    }

    static MajorityIndex load(Reader& r) {
        MajorityIndex x;
        x.cfg_.chunk_len = r.get<std::uint64_t>();
        x.cfg_.trade = r.get<std::uint64_t>();
        auto verify = r.get<std::uint8_t>(), dispatch = r.get<std::uint8_t>();
        if (verify > 1 || dispatch > 2) throw FormatError("majority configuration");
        x.cfg_.verify = static_cast<Verify>(verify);
        x.cfg_.dispatch = static_cast<Dispatch>(dispatch);
        x.cfg_.sampled_families = r.get<std::uint8_t>() != 0;
        try {
            x.cfg_.validate();
        } catch (const ConfigError& e) {
            throw FormatError(e.what());
        }
        x.n_ = r.get<std::uint64_t>();
        x.sigma_ = r.get<std::uint32_t>();
        auto count = r.get<std::uint64_t>();
        for (std::uint64_t c = 0; c < count; ++c) {
            unsigned t = r.get<std::uint8_t>(), b = r.get<std::uint8_t>();
            Family f;
            f.g = CompactBits::load(r);
            f.sampled = r.get<std::uint8_t>() != 0;
            if (f.sampled) {
                f.j = CompactBits::load(r);
                f.symbols = PackedInts::load(r);
                f.links = PackedInts::load(r);
                f.listing = ListingIndex::load(r);
                if (f.symbols.size() != f.j.ones() || f.links.size() != f.j.ones() || f.listing.size() != f.j.ones())
                    throw FormatError("sampled family shape mismatch");
            }
            if (f.g.size() != x.n_ || (f.sampled && f.j.size() != x.n_)) throw FormatError("family length mismatch");
            if (f.sampled != x.cfg_.sampled_families) throw FormatError("sampled family presence mismatch");
            x.families_.emplace(std::make_pair(t, b), std::move(f));
        }
        return x;
    }

    bool operator==(const MajorityIndex& o) const {
        return n_ == o.n_ && sigma_ == o.sigma_ && cfg_.chunk_len == o.cfg_.chunk_len && cfg_.trade == o.cfg_.trade &&
               cfg_.verify == o.cfg_.verify && cfg_.dispatch == o.cfg_.dispatch && cfg_.sampled_families == o.cfg_.sampled_families &&
               families_ == o.families_;
    }

   private:
    unsigned max_t() const { return bits::ceil_log2(sigma_); }

    // window[k-1] = occurrences of S[k] within [k - 2^(b+1) .. k + 2^(b+1)]
    void window_counts(const detail::Occurrences& occ, unsigned b, std::vector<std::uint32_t>& window) const {
        const std::uint64_t w = std::uint64_t{1} << (b + 1);
        for (std::uint32_t a = 1; a <= sigma_; ++a) {
            const std::uint64_t *first = occ.begin(a), *last = occ.end(a), *lo = first, *hi = first;
            for (const std::uint64_t* x = first; x != last; ++x) {
                while (*lo + w < *x) ++lo;
                while (hi != last && *hi <= *x + w) ++hi;
                window[*x - 1] = static_cast<std::uint32_t>(hi - lo);
            }
        }
    }

    static std::uint64_t need(unsigned t, unsigned b) { return b >= t ? std::uint64_t{1} << (b - t) : 1; }

    CompactBits build_g(const detail::Occurrences& occ, const std::vector<std::uint32_t>& window, unsigned t, unsigned b) const {
        const std::uint64_t blk = std::uint64_t{1} << (b - 1), k_need = need(t, b);
        std::vector<std::uint64_t> words(bits::ceil_div(n_, 64) + 1, 0);
        for (std::uint64_t k = 1; k <= n_; ++k) {
            if (window[k - 1] < k_need) continue;
            std::uint64_t start = (k - 1) / blk * blk + 1, stop = std::min(n_, start + blk - 1);
            if (occ.prev[k - 1] < start || occ.next[k - 1] > stop) words[(k - 1) >> 6] |= 1ULL << ((k - 1) & 63);
        }
        return CompactBits(BitVector(std::move(words), n_));
    }

    void build_j(const std::vector<std::uint32_t>& s, const detail::Occurrences& occ, const std::vector<std::uint32_t>& window, unsigned t,
                 unsigned b, Family& f) const {
        const std::uint64_t w = std::uint64_t{1} << (b + 1), k_need = need(t, b), c = cfg_.chunk_len;
        std::vector<std::uint64_t> marked;
        std::vector<std::uint64_t> qualifying;
        for (std::uint32_t a = 1; a <= sigma_; ++a) {
            std::uint64_t na = occ.count(a);
            if (na < c) continue;
            const std::uint64_t* first = occ.begin(a);
            qualifying.assign(na + 1, 0);
            for (std::uint64_t x = 0; x < na; ++x) qualifying[x + 1] = qualifying[x] + (window[first[x] - 1] >= k_need);
            for (std::uint64_t r = c; r <= na; r += c) {
                std::uint64_t p = first[r - 1];
                auto lo = std::lower_bound(first, first + na, p > w ? p - w : 1) - first;
                auto hi = std::upper_bound(first, first + na, p + w) - first;
                if (qualifying[hi] > qualifying[lo]) marked.push_back(p);
            }
        }
        std::sort(marked.begin(), marked.end());
        if (marked.size() > n_ / c) throw std::logic_error("sampled family exceeds n / chunk_len ones");
        std::vector<std::uint32_t> sub(marked.size());
        for (std::size_t x = 0; x < marked.size(); ++x) sub[x] = s[marked[x] - 1];
        auto links = previous_occurrences(sub, sigma_);
        f.sampled = true;
        for (auto& x : marked) --x;
        f.j = CompactBits(BitVector::from_indices(n_, marked));
        f.symbols = PackedInts::from(sub);
        f.links = PackedInts::from(links);
        f.listing = ListingIndex::full(links);
    }

    void check_bounds(const Family& f, unsigned t, unsigned b) {
        double blocks = static_cast<double>(bits::ceil_div(n_, std::uint64_t{1} << (b - 1)));
        double bound = 8.0 * static_cast<double>(n_) * std::ldexp(1.0, static_cast<int>(t) - static_cast<int>(b)) + 2 * blocks;
        if (static_cast<double>(f.g.ones()) > bound)
            warnings_.push_back("G(t=" + std::to_string(t) + ",b=" + std::to_string(b) + ") has " + std::to_string(f.g.ones()) +
                                " ones, above the envelope " + std::to_string(bound));
    }

    // Definitional check of every family on short inputs, by direct scans.
    void verify_small(const std::vector<std::uint32_t>& s) const {
        const std::uint64_t n = n_;
        for (auto& [key, f] : families_) {
            auto [t, b] = key;
            const std::uint64_t w = std::uint64_t{1} << (b + 1), blk = std::uint64_t{1} << (b - 1);
            std::vector<bool> qual(n + 1, false);
            for (std::uint64_t k = 1; k <= n; ++k) {
                std::uint64_t lo = k > w ? k - w : 1, hi = std::min(n, k + w), cnt = 0;
                for (std::uint64_t x = lo; x <= hi; ++x) cnt += s[x - 1] == s[k - 1];
                qual[k] = cnt >= need(t, b);
            }
            for (std::uint64_t k = 1; k <= n; ++k) {
                std::uint64_t start = (k - 1) / blk * blk + 1, stop = std::min(n, start + blk - 1);
                bool leftmost = true, rightmost = true;
                for (std::uint64_t x = start; x < k; ++x) leftmost &= s[x - 1] != s[k - 1];
                for (std::uint64_t x = k + 1; x <= stop; ++x) rightmost &= s[x - 1] != s[k - 1];
                if (f.g[k - 1] != (qual[k] && (leftmost || rightmost)))
                    throw std::logic_error("G(t=" + std::to_string(t) + ",b=" + std::to_string(b) + ") wrong at " + std::to_string(k));
            }
            if (!f.sampled) continue;
            for (std::uint64_t p = 1; p <= n; ++p) {
                std::uint64_t r = 0;
                for (std::uint64_t x = 1; x <= p; ++x) r += s[x - 1] == s[p - 1];
                bool want = false;
                if (r % cfg_.chunk_len == 0)
                    for (std::uint64_t k = p > w ? p - w : 1; k <= std::min(n, p + w) && !want; ++k) want = s[k - 1] == s[p - 1] && qual[k];
                if (f.j[p - 1] != want)
                    throw std::logic_error("J(t=" + std::to_string(t) + ",b=" + std::to_string(b) + ") wrong at " + std::to_string(p));
            }
        }
    }

    // (position, rank) of the first occurrence of a at or after i within anchor's chunk
    std::optional<std::pair<std::uint64_t, std::uint64_t>> successor_in_chunk(const WaveletSequence& seq, std::uint32_t a,
                                                                              std::uint64_t anchor, std::uint64_t i, QueryStats& st) const {
        ++st.partial_ranks;
        auto [sym, r] = seq.access_rank(anchor);
        if (sym != a) throw DomainError("anchor does not hold the symbol");
        const std::uint64_t c = cfg_.chunk_len;
        std::uint64_t lo = (r - 1) / c * c + 1, hi = r;
        if (i > anchor) {
            hi = std::min(lo + c - 1, seq.count(a));
            if (*detail::counted_select(seq, a, hi, st) < i) return std::nullopt;
        }
        std::uint64_t rank = detail::first_rank_at_least(seq, a, lo, hi, i, st);
        if (rank == lo && lo > 1 && *detail::counted_select(seq, a, lo - 1, st) >= i) return std::nullopt;
        return std::make_pair(rank == r ? anchor : *detail::counted_select(seq, a, rank, st), rank);
    }

    Counted all_symbols(const WaveletSequence& seq, const ListingIndex* listing, const QueryParams& p, QueryStats& st, Verify v) const {
        Counted out;
        if (v == Verify::check && listing) {
            SequenceCells cells(seq, st);
            listing->for_each_distinct(cells, p.i, p.j, st, [&](std::uint32_t a, std::uint64_t k) {
                ++st.candidates;
                ++st.partial_ranks;
                std::uint64_t r = seq.partial_rank(k);
                if (detail::check_from_leftmost(seq, a, r, p, st)) out.emplace_back(a, detail::counted_rank(seq, a, p.j, st) - r + 1);
                return true;
            });
            return out;
        }
        for (std::uint32_t a = 1; a <= sigma_; ++a) {
            ++st.candidates;
            auto occ = detail::range_count(seq, a, p.i, p.j, st);
            if (p.is_majority(occ)) out.emplace_back(a, occ);
        }
        return out;
    }

    Counted flagged(const WaveletSequence& seq, const QueryParams& p, QueryStats& st, Verify v) const {
        const Family& f = families_.at({p.t, p.b});
        Counted out;
        std::unordered_set<std::uint32_t> seen, decided;
        f.g.for_each_one(p.i, p.j, [&](std::uint64_t k) {
            ++st.accesses;
            std::uint32_t a = seq.access(k);
            if (!seen.insert(a).second) return true;
            ++st.candidates;
            if (v == Verify::rank) {
                auto occ = detail::range_count(seq, a, p.i, p.j, st);
                if (p.is_majority(occ)) out.emplace_back(a, occ);
                return true;
            }
            // leftmost occurrence in range, searched inside k's chunk; when the chunk starts
            // after i the symbol has a sampled occurrence in range and is left to J
            ++st.partial_ranks;
            std::uint64_t r = seq.partial_rank(k);
            std::uint64_t lo = (r - 1) / cfg_.chunk_len * cfg_.chunk_len + 1;
            std::uint64_t rl = detail::first_rank_at_least(seq, a, lo, r, p.i, st);
            if (rl == lo && lo > 1 && *detail::counted_select(seq, a, lo - 1, st) >= p.i) return true;
            decided.insert(a);
            if (detail::check_from_leftmost(seq, a, rl, p, st))
                out.emplace_back(a, detail::counted_rank(seq, a, p.j, st) - rl + 1);
            return true;
        });
        if (v == Verify::rank) return out;
        std::uint64_t k1 = f.j.rank1(p.i - 1) + 1, k2 = f.j.rank1(p.j);
        if (k1 > k2) return out;
        ExplicitCells cells(f.symbols, f.links, st);
        f.listing.for_each_distinct(cells, k1, k2, st, [&](std::uint32_t a, std::uint64_t kk) {
            if (decided.count(a)) return true;
            if (seen.insert(a).second) ++st.candidates;
            auto hit = successor_in_chunk(seq, a, f.j.select1(kk), p.i, st);
            if (hit && detail::check_from_leftmost(seq, a, hit->second, p, st))
                out.emplace_back(a, detail::counted_rank(seq, a, p.j, st) - hit->second + 1);
            return true;
        });
        return out;
    }

    MajorityConfig cfg_;
    std::uint64_t n_ = 0;
    std::uint32_t sigma_ = 1;
    std::map<std::pair<unsigned, unsigned>, Family> families_;
    std::vector<std::string> warnings_;
};

inline Counted sequential_majorities(const WaveletSequence& seq, std::uint64_t i, std::uint64_t j, double tau, QueryStats& st) {
    return MajorityIndex::sequential(seq, QueryParams::make(i, j, tau, seq.size()), st);
}

}  // namespace rfq
