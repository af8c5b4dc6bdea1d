#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "listing.hpp"
#include "majority.hpp"
#include "minority.hpp"
#include "query_support.hpp"
#include "serialize.hpp"
#include "wavelet_sequence.hpp"

namespace rfq {

struct IndexConfig {
    SequenceOptions sequence{};
    std::uint64_t listing_block = 1;  // 1: full listing; larger: sparsified with that block length
    std::uint64_t trade = 1;          // g of the flag families, also the work factor of the bounds
    std::uint64_t chunk_len = 1024;
    Verify verify = Verify::rank;
    Dispatch dispatch = Dispatch::automatic;
    MinorityStrategy minority = MinorityStrategy::flags;
    bool sampled_families = true;

    // binary plain wavelet tree; listing and G families thinned by 64, minority through the
    // listing and rank verification, so no I or J families are stored
    static IndexConfig plain() {
        IndexConfig c;
        c.listing_block = 64;
        c.trade = 64;
        c.minority = MinorityStrategy::listing;
        c.sampled_families = false;
        return c;
    }

    // as plain, over a Huffman-shaped tree with entropy-sized bitvectors
    static IndexConfig compressed() {
        IndexConfig c = plain();
        c.sequence.mode = SequenceOptions::Mode::compressed;
        return c;
    }

    MajorityConfig majority_config() const { return {chunk_len, trade, verify, dispatch, sampled_families}; }
    MinorityConfig minority_config() const { return {minority, verify, trade, dispatch}; }

    void validate() const {
        if (listing_block == 0) throw ConfigError("listing block length must be positive");
        majority_config().validate();
        minority_config().validate();
    }

    bool operator==(const IndexConfig& o) const {
        return sequence.mode == o.sequence.mode && sequence.arity == o.sequence.arity && listing_block == o.listing_block &&
               trade == o.trade && chunk_len == o.chunk_len && verify == o.verify && dispatch == o.dispatch && minority == o.minority &&
               sampled_families == o.sampled_families;
    }
};

struct FamilySpace {
    char kind;  // 'G', 'J' or 'I'
    unsigned t, b;
    std::uint64_t ones, bits;
};

struct SpaceReport {
    std::uint64_t n = 0;
    std::uint32_t sigma = 0;
    double h0 = 0;  // empirical zero-order entropy, bits per symbol
    std::uint64_t sequence_bits = 0, listing_bits = 0, g_bits = 0, j_bits = 0, i_bits = 0, other_bits = 0, total_bits = 0;
    std::vector<FamilySpace> families;

    double nh0_bits() const { return static_cast<double>(n) * h0; }
    double n_lg_sigma_bits() const { return static_cast<double>(n) * bits::ceil_log2(std::max<std::uint32_t>(sigma, 2)); }
    double ratio_to_nh0() const { return nh0_bits() > 0 ? static_cast<double>(total_bits) / nh0_bits() : 0; }
    double ratio_to_n_lg_sigma() const { return n ? static_cast<double>(total_bits) / n_lg_sigma_bits() : 0; }
};

// Everything needed to answer range majority, minority and mode queries over one
// sequence: the wavelet tree, a distinct-element listing, and both flag indexes.
class RangeIndex {
   public:
    RangeIndex() = default;

    // sigma = 0 takes the largest symbol
    RangeIndex(const std::vector<std::uint32_t>& s, std::uint32_t sigma = 0, IndexConfig cfg = {}) : cfg_(cfg) {
        cfg_.validate();
        seq_ = WaveletSequence(s, sigma, cfg_.sequence);
        auto c = previous_occurrences(s, seq_.sigma());
        listing_ = cfg_.listing_block == 1 ? ListingIndex::full(c) : ListingIndex::sparsified(c, cfg_.listing_block);
        majority_ = MajorityIndex(s, seq_.sigma(), cfg_.majority_config());
        minority_ = MinorityIndex(s, seq_.sigma(), cfg_.minority_config());
    }

    std::uint64_t size() const { return seq_.size(); }
    std::uint32_t sigma() const { return seq_.sigma(); }
    const IndexConfig& config() const { return cfg_; }
    const WaveletSequence& sequence() const { return seq_; }
    const ListingIndex& listing() const { return listing_; }
    const MajorityIndex& majority_index() const { return majority_; }
    const MinorityIndex& minority_index() const { return minority_; }

    Counted majorities(std::uint64_t i, std::uint64_t j, double tau, QueryStats* st = nullptr, std::optional<Verify> v = {}) const {
        QueryStats local;
        return majority_.query(seq_, &listing_, i, j, tau, st ? *st : local, v);
    }

    Found minority(std::uint64_t i, std::uint64_t j, double tau, QueryStats* st = nullptr, std::optional<Verify> v = {}) const {
        QueryStats local;
        return minority_.query(seq_, &listing_, i, j, tau, st ? *st : local, v);
    }

    std::pair<std::uint32_t, std::uint64_t> mode(std::uint64_t i, std::uint64_t j, QueryStats* st = nullptr) const {
        QueryStats local;
        return majority_.mode(seq_, &listing_, i, j, st ? *st : local);
    }

    // see MajorityIndex::clear_last_flag
    bool inject_fault(unsigned t, unsigned b) { return majority_.clear_last_flag(t, b); }

    SpaceReport space_report() const {
        SpaceReport r;
        r.n = size();
        r.sigma = sigma();
        r.h0 = seq_.entropy_h0();
        r.sequence_bits = seq_.size_in_bits();
        r.listing_bits = listing_.size_in_bits();
        for (auto& [key, f] : majority_.families()) {
            r.families.push_back({'G', key.first, key.second, f.g.ones(), f.g.size_in_bits()});
            if (!f.sampled) continue;
            std::uint64_t jb = f.j.size_in_bits() + f.symbols.size_in_bits() + f.links.size_in_bits() + f.listing.size_in_bits();
            r.families.push_back({'J', key.first, key.second, f.j.ones(), jb});
        }
        for (auto& [key, f] : minority_.families()) r.families.push_back({'I', key.first, key.second, f.ones(), f.size_in_bits()});
        r.g_bits = majority_.g_bits();
        r.j_bits = majority_.j_bits();
        r.i_bits = minority_.size_in_bits() - minority_overhead;
        r.other_bits = majority_.size_in_bits() - r.g_bits - r.j_bits + minority_overhead + 512;
        r.total_bits = r.sequence_bits + r.listing_bits + r.g_bits + r.j_bits + r.i_bits + r.other_bits;
        return r;
    }

    void save(Writer& w) const {
        Writer head, seq, list, maj, min;
        head.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.sequence.mode));
        head.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.sequence.arity));
        head.put(cfg_.listing_block);
        head.put(cfg_.trade);
        head.put(cfg_.chunk_len);
        head.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.verify));
        head.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.dispatch));
        head.put<std::uint8_t>(static_cast<std::uint8_t>(cfg_.minority));
        head.put<std::uint8_t>(cfg_.sampled_families);
        seq_.save(seq);
        listing_.save(list);
        majority_.save(maj);
        minority_.save(min);
        w.put_section(section_tag("CONF"), head);
        w.put_section(section_tag("SEQS"), seq);
        w.put_section(section_tag("LIST"), list);
        w.put_section(section_tag("MAJF"), maj);
        w.put_section(section_tag("MINF"), min);
    }

    static RangeIndex load(Reader& r) {
        RangeIndex x;
        auto head = r.section(section_tag("CONF"));
        auto mode = head.get<std::uint8_t>();
        if (mode > 1) throw FormatError("sequence mode");
        x.cfg_.sequence.mode = static_cast<SequenceOptions::Mode>(mode);
        x.cfg_.sequence.arity = head.get<std::uint8_t>();
        x.cfg_.listing_block = head.get<std::uint64_t>();
        x.cfg_.trade = head.get<std::uint64_t>();
        x.cfg_.chunk_len = head.get<std::uint64_t>();
        auto verify = head.get<std::uint8_t>(), dispatch = head.get<std::uint8_t>(), minority = head.get<std::uint8_t>();
        auto sampled = head.get<std::uint8_t>();
        if (verify > 1 || dispatch > 2 || minority > 1 || sampled > 1) throw FormatError("index configuration");
        x.cfg_.verify = static_cast<Verify>(verify);
        x.cfg_.dispatch = static_cast<Dispatch>(dispatch);
        x.cfg_.minority = static_cast<MinorityStrategy>(minority);
        x.cfg_.sampled_families = sampled;
        try {
            x.cfg_.validate();
        } catch (const ConfigError& e) {
            throw FormatError(std::string("index configuration: ") + e.what());
        }
        auto seq = r.section(section_tag("SEQS"));
        x.seq_ = WaveletSequence::load(seq);
        auto list = r.section(section_tag("LIST"));
        x.listing_ = ListingIndex::load(list);
        auto maj = r.section(section_tag("MAJF"));
        x.majority_ = MajorityIndex::load(maj);
        auto min = r.section(section_tag("MINF"));
        x.minority_ = MinorityIndex::load(min);
        if (x.listing_.size() != x.seq_.size() || x.majority_.size() != x.seq_.size())
            throw FormatError("component lengths disagree");
        return x;
    }

    bool operator==(const RangeIndex& o) const {
        return cfg_ == o.cfg_ && seq_ == o.seq_ && listing_ == o.listing_ && majority_ == o.majority_ && minority_ == o.minority_;
    }

   private:
    static constexpr std::uint64_t minority_overhead = 192;

    IndexConfig cfg_;
    WaveletSequence seq_;
    ListingIndex listing_;
    MajorityIndex majority_;
    MinorityIndex minority_;
};

}  // namespace rfq
