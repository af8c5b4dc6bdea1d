#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "compact_bits.hpp"
#include "listing.hpp"
#include "majority.hpp"
#include "query_support.hpp"
#include "serialize.hpp"
#include "swar_kernel.hpp"
#include "wavelet_sequence.hpp"

namespace rfq {

enum class MinorityStrategy : std::uint8_t { listing = 0, flags = 1 };

struct MinorityConfig {
    MinorityStrategy strategy = MinorityStrategy::flags;
    Verify verify = Verify::rank;
    std::uint64_t trade = 1;  // same cutoff rule as the majority flags
    Dispatch dispatch = Dispatch::automatic;

    void validate() const {
        if (trade == 0) throw ConfigError("trade parameter must be positive");
    }
};

using Found = std::optional<std::pair<std::uint32_t, std::uint64_t>>;

// Minority index. For every reachable (t, b), I flags per block of 2^(b-1) the leftmost
// occurrences of the first 2^t distinct values and the rightmost occurrences of the last
// 2^t distinct values; any query range then has a minority among its flagged positions,
// if it has one at all.
class MinorityIndex {
   public:
    MinorityIndex() = default;

    MinorityIndex(const std::vector<std::uint32_t>& s, std::uint32_t sigma, MinorityConfig cfg = {})
        : cfg_(cfg), n_(s.size()), sigma_(sigma) {
        cfg_.validate();
        if (cfg_.strategy == MinorityStrategy::listing || n_ < MajorityIndex::kMinFamilies) return;
        detail::Occurrences occ(s, sigma_);
        for (unsigned b = 1; b <= bits::floor_log2(n_); ++b)
            for (unsigned t = 0; t <= bits::ceil_log2(sigma_); ++t)
                if (b >= b_lo(t)) families_.emplace(std::make_pair(t, b), build_i(occ, t, b));
        if (n_ <= 512) verify_small(s);
    }

    const MinorityConfig& config() const { return cfg_; }
    const std::map<std::pair<unsigned, unsigned>, CompactBits>& families() const { return families_; }

    unsigned b_lo(unsigned t) const {
        if (cfg_.dispatch == Dispatch::flagged) return std::max(1u, t);
        return std::max(1u, t + bits::ceil_log2(cfg_.trade) + 2);
    }

    Found query(const WaveletSequence& seq, const ListingIndex* listing, std::uint64_t i, std::uint64_t j, double tau, QueryStats& st,
                std::optional<Verify> verify = {}) const {
        auto p = QueryParams::make(i, j, tau, n_);
        Verify v = verify.value_or(cfg_.verify);
        if (p.threshold == 0) return std::nullopt;
        if (cfg_.strategy == MinorityStrategy::listing) {
            if (!listing) throw ConfigError("listing strategy needs a listing structure");
            return by_listing(seq, *listing, p, st, v);
        }
        if (p.below_alphabet(sigma_)) {
            for (std::uint32_t a = 1; a <= sigma_; ++a) {
                ++st.candidates;
                auto occ = detail::range_count(seq, a, p.i, p.j, st);
                if (p.is_minority(occ)) return std::make_pair(a, occ);
            }
            return std::nullopt;
        }
        if (cfg_.dispatch == Dispatch::sequential || families_.empty() || p.b < b_lo(p.t)) return sequential(seq, p, st);
        return flagged(seq, p, st, v);
    }

    // Short ranges: the word-parallel low band on tiny alphabets, else a distinct-head scan
    // that stops at the first head that is not a majority.
    static Found sequential(const WaveletSequence& seq, const QueryParams& p, QueryStats& st) {
        if (unsigned sp = swar_alphabet_for(seq.sigma(), p.len)) {
            auto low = swar_band_counts(detail::shifted_extract(seq, p.i, p.j, st), sp, p.threshold + 1, Band::low);
            if (low.empty()) return std::nullopt;
            ++st.candidates;
            return std::make_pair(low.front().first + 1, low.front().second);
        }
        Found out;
        detail::scan_heads(seq, p.i, p.j, st, [&](std::uint32_t a, std::uint64_t, std::uint64_t occ, std::uint64_t) {
            ++st.candidates;
            if (p.is_minority(occ)) out = std::make_pair(a, occ);
            return !out;
        });
        return out;
    }

    // k must be the leftmost occurrence of a in [i..j]
    static bool verify_minority(const WaveletSequence& seq, std::uint32_t a, std::uint64_t k, const QueryParams& p, QueryStats& st) {
        return !MajorityIndex::check_candidate(seq, a, k, p, st).majority;
    }

    std::uint64_t size_in_bits() const {
        std::uint64_t total = 192;
        for (auto& [key, f] : families_) total += f.size_in_bits();
        return total;
    }

    void save(Writer& w) const {
        w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.strategy));
        w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.verify));
        w.put(cfg_.trade);
        w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.dispatch));
        w.put(n_);
        w.put(sigma_);
        w.put<std::uint64_t>(families_.size());
        for (auto& [key, f] : families_) {
            w.put<std::uint8_t>(static_cast<std::uint8_t>(key.first));
            w.put<std::uint8_t>(static_cast<std::uint8_t>(key.second));
            f.save(w);
        }
    }

    static MinorityIndex load(Reader& r) {
        MinorityIndex x;
        auto strategy = r.get<std::uint8_t>(), verify = r.get<std::uint8_t>();
        x.cfg_.trade = r.get<std::uint64_t>();
        auto dispatch = r.get<std::uint8_t>();
        if (strategy > 1 || verify > 1 || dispatch > 2 || x.cfg_.trade == 0) throw FormatError("minority configuration");
        x.cfg_.strategy = static_cast<MinorityStrategy>(strategy);
        x.cfg_.verify = static_cast<Verify>(verify);
        x.cfg_.dispatch = static_cast<Dispatch>(dispatch);
        x.n_ = r.get<std::uint64_t>();
        x.sigma_ = r.get<std::uint32_t>();
        auto count = r.get<std::uint64_t>();
        for (std::uint64_t c = 0; c < count; ++c) {
            unsigned t = r.get<std::uint8_t>(), b = r.get<std::uint8_t>();
            auto f = CompactBits::load(r);
            if (f.size() != x.n_) throw FormatError("family length mismatch");
            x.families_.emplace(std::make_pair(t, b), std::move(f));
        }
        return x;
    }

    bool operator==(const MinorityIndex& o) const {
        return n_ == o.n_ && sigma_ == o.sigma_ && cfg_.strategy == o.cfg_.strategy && cfg_.verify == o.cfg_.verify &&
               cfg_.trade == o.cfg_.trade && cfg_.dispatch == o.cfg_.dispatch && families_ == o.families_;
    }

   private:
    CompactBits build_i(const detail::Occurrences& occ, unsigned t, unsigned b) const {
        const std::uint64_t blk = std::uint64_t{1} << (b - 1), want = std::uint64_t{1} << std::min(t, 63u);
        std::vector<std::uint64_t> words(bits::ceil_div(n_, 64) + 1, 0);
        auto flag = [&](std::uint64_t k) { words[(k - 1) >> 6] |= 1ULL << ((k - 1) & 63); };
        for (std::uint64_t start = 1; start <= n_; start += blk) {
            std::uint64_t stop = std::min(n_, start + blk - 1), found = 0;
            for (std::uint64_t k = start; k <= stop && found < want; ++k)
                if (occ.prev[k - 1] < start) flag(k), ++found;
            found = 0;
            for (std::uint64_t k = stop; k >= start && found < want; --k)
                if (occ.next[k - 1] > stop) flag(k), ++found;
        }
        return CompactBits(BitVector(std::move(words), n_));
    }

    void verify_small(const std::vector<std::uint32_t>& s) const {
        for (auto& [key, f] : families_) {
            auto [t, b] = key;
            const std::uint64_t blk = std::uint64_t{1} << (b - 1), want = std::uint64_t{1} << t;
            std::vector<bool> expect(n_ + 1, false);
            for (std::uint64_t start = 1; start <= n_; start += blk) {
                std::uint64_t stop = std::min(n_, start + blk - 1), per_block = 0;
                std::vector<std::uint32_t> seen;
                for (std::uint64_t k = start; k <= stop; ++k)
                    if (std::find(seen.begin(), seen.end(), s[k - 1]) == seen.end()) {
                        seen.push_back(s[k - 1]);
                        if (seen.size() <= want) expect[k] = true;
                    }
                seen.clear();
                for (std::uint64_t k = stop; k >= start; --k)
                    if (std::find(seen.begin(), seen.end(), s[k - 1]) == seen.end()) {
                        seen.push_back(s[k - 1]);
                        if (seen.size() <= want) expect[k] = true;
                    }
                for (std::uint64_t k = start; k <= stop; ++k) per_block += f[k - 1];
                if (per_block > 2 * want) throw std::logic_error("I family flags too many positions in a block");
            }
            for (std::uint64_t k = 1; k <= n_; ++k)
                if (f[k - 1] != expect[k])
                    throw std::logic_error("I(t=" + std::to_string(t) + ",b=" + std::to_string(b) + ") wrong at " + std::to_string(k));
        }
    }

    // a, first seen at flagged position k, is a minority iff its leftmost occurrence in
    // range starts fewer than threshold + 1 occurrences that stay within j
    static Found check_from(const WaveletSequence& seq, std::uint32_t a, std::uint64_t k, const QueryParams& p, QueryStats& st) {
        ++st.partial_ranks;
        std::uint64_t r = seq.partial_rank(k);
        std::uint64_t lo = r > p.threshold ? r - p.threshold : 1;
        std::uint64_t rl = detail::first_rank_at_least(seq, a, lo, r, p.i, st);
        if (rl == lo && r - lo == p.threshold) return std::nullopt;  // threshold + 1 occurrences in [i..k]
        if (detail::check_from_leftmost(seq, a, rl, p, st)) return std::nullopt;
        return std::make_pair(a, detail::counted_rank(seq, a, p.j, st) - rl + 1);
    }

    Found by_listing(const WaveletSequence& seq, const ListingIndex& listing, const QueryParams& p, QueryStats& st, Verify v) const {
        Found out;
        std::uint64_t cap = p.distinct_cap(), tested = 0;
        SequenceCells cells(seq, st);
        listing.for_each_distinct(cells, p.i, p.j, st, [&](std::uint32_t a, std::uint64_t k) {
            ++st.candidates;
            ++tested;
            if (v == Verify::rank) {
                auto occ = detail::range_count(seq, a, p.i, p.j, st);
                if (p.is_minority(occ)) out = std::make_pair(a, occ);
            } else {
                ++st.partial_ranks;
                std::uint64_t r = seq.partial_rank(k);
                if (!detail::check_from_leftmost(seq, a, r, p, st)) out = std::make_pair(a, detail::counted_rank(seq, a, p.j, st) - r + 1);
            }
            return !out && tested < cap;
        });
        return out;
    }

    Found flagged(const WaveletSequence& seq, const QueryParams& p, QueryStats& st, Verify v) const {
        const CompactBits& f = families_.at({p.t, p.b});
        Found out;
        std::unordered_set<std::uint32_t> seen;
        std::uint64_t cap = p.distinct_cap();
        f.for_each_one(p.i, p.j, [&](std::uint64_t k) {
            ++st.accesses;
            std::uint32_t a = seq.access(k);
            if (!seen.insert(a).second) return true;
            ++st.candidates;
            if (v == Verify::rank) {
                auto occ = detail::range_count(seq, a, p.i, p.j, st);
                if (p.is_minority(occ)) out = std::make_pair(a, occ);
            } else {
                out = check_from(seq, a, k, p, st);
            }
            return !out && seen.size() < cap;
        });
        return out;
    }

    MinorityConfig cfg_;
    std::uint64_t n_ = 0;
    std::uint32_t sigma_ = 1;
    std::map<std::pair<unsigned, unsigned>, CompactBits> families_;
};

}  // namespace rfq
