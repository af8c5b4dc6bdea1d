// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <rfq/rfq.hpp>
#include <rfq/oracle.hpp>

#include "test_support.hpp"

using namespace rfq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::string first_failure;

    void fail(const std::string& why) {
        if (pass) first_failure = why;
        pass = false;
    }
};

std::uint64_t inv_ceil(double tau) { return static_cast<std::uint64_t>(std::ceil(1.0 / tau)); }

std::string range_text(std::uint64_t n, std::uint32_t sigma, std::uint64_t i, std::uint64_t j, double tau) {
    std::ostringstream o;
    o << "n=" << n << " sigma=" << sigma << " [" << i << ".." << j << "] tau=" << tau;
    return o.str();
}

// ---- criteria 1-4 share one randomized corpus

struct CorpusTallies {
    Outcome majorities, minorities, bounds, mode;
    std::uint64_t cases = 0, mode_cases = 0;
    double worst_candidates = 0, worst_ops = 0;  // as fractions of the allowed bound
};

CorpusTallies run_corpus() {
    CorpusTallies r;
    gen::Rng rng(20240901);
    const std::uint32_t sigmas[] = {2, 4, 16, 256, 1024};
    const std::uint64_t chunks[] = {1024, 4, 16};
    const int strings = 600, queries = 25;
    for (int rep = 0; rep < strings; ++rep) {
        std::uint32_t sigma = sigmas[rep % 5];
        bool zipf = (rep / 5) % 2;
        std::uint64_t n = rep % 3 == 0 ? 1 + rng() % 2048 : 1 + rng() % (rep % 3 == 1 ? 600 : 64);
        auto s = gen::random_string(rng, n, sigma, zipf);
        MajorityConfig mcfg;
        mcfg.chunk_len = chunks[rep % 3];
        mcfg.trade = rep % 4 == 3 ? 4 : 1;
        MinorityConfig flags_cfg, listing_cfg;
        flags_cfg.trade = mcfg.trade;
        listing_cfg.strategy = MinorityStrategy::listing;
        WaveletSequence seq(s, sigma);
        auto listing = ListingIndex::full(previous_occurrences(s, sigma));
        MajorityIndex maj(s, sigma, mcfg);
        MinorityIndex by_flags(s, sigma, flags_cfg), by_listing(s, sigma, listing_cfg);
        const double taus[] = {1, 0.9, 0.5, 0.2, 0.05, 1.0 / sigma, 0.5 / sigma};
        for (int q = 0; q < queries; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            double tau = taus[rng() % 7];
            auto truth = oracle::evaluate(s, i, j, tau);
            std::uint64_t m = inv_ceil(tau);
            std::uint64_t cand_bound = 64 * m + (tau * sigma < 1 ? sigma : 0), ops_bound = 64 * m * mcfg.trade;
            ++r.cases;
            for (Verify v : {Verify::rank, Verify::check}) {
                QueryStats st;
                auto got = maj.query(seq, &listing, i, j, tau, st, v);
                if (got != truth.majorities) r.majorities.fail(range_text(n, sigma, i, j, tau));
                std::uint64_t ops = st.sequence_ops() + st.accesses;
                r.worst_candidates = std::max(r.worst_candidates, static_cast<double>(st.candidates) / static_cast<double>(cand_bound));
                r.worst_ops = std::max(r.worst_ops, static_cast<double>(ops) / static_cast<double>(ops_bound));
                if (st.candidates > cand_bound || ops > ops_bound)
                    r.bounds.fail("majority " + range_text(n, sigma, i, j, tau) + " candidates=" + std::to_string(st.candidates) +
                                  " ops=" + std::to_string(ops));
                for (const MinorityIndex* idx : {&by_flags, &by_listing}) {
                    QueryStats ms;
                    auto found = idx->query(seq, &listing, i, j, tau, ms, v);
                    bool ok = found ? std::find(truth.minorities.begin(), truth.minorities.end(), *found) != truth.minorities.end()
                                    : truth.minorities.empty();
                    if (!ok) r.minorities.fail(range_text(n, sigma, i, j, tau));
                    if (ms.candidates > cand_bound) r.bounds.fail("minority " + range_text(n, sigma, i, j, tau));
                }
            }
            QueryStats st;
            auto mode = maj.mode(seq, &listing, i, j, st);
            ++r.mode_cases;
            if (mode != truth.mode) r.mode.fail("mode " + range_text(n, sigma, i, j, 0));
            double ratio = static_cast<double>(j - i + 1) / static_cast<double>(truth.mode.second);
            if (st.mode_iterations > static_cast<std::uint64_t>(std::ceil(std::log2(ratio))) + 1)
                r.mode.fail("mode iterations " + std::to_string(st.mode_iterations) + " at " + range_text(n, sigma, i, j, 0));
        }
    }
    return r;
}

// ---- criterion 3: growth of the work with 1/tau

struct SlopeResult {
    double slope = 0;
    std::vector<std::pair<double, double>> points;  // (1/tau, mean ops)
};

SlopeResult measure_slope() {
    gen::Rng rng(3);
    const std::uint64_t n = 1000000;
    auto s = gen::zipf_string(rng, n, 4096, 1.1);
    IndexConfig cfg;
    cfg.chunk_len = 1024;
    RangeIndex idx(s, 4096, cfg);
    SlopeResult out;
    for (int k = 1; k <= 8; ++k) {
        double tau = std::ldexp(1.0, -k);
        gen::Rng qrng(100 + k);
        double total = 0;
        const int queries = 3000;
        for (int q = 0; q < queries; ++q) {
            // log-uniform lengths from 2 to n
            double lg = 1 + static_cast<double>(qrng() % 1000000) / 1e6 * (std::log2(static_cast<double>(n)) - 1);
            std::uint64_t len = std::min<std::uint64_t>(n, static_cast<std::uint64_t>(std::exp2(lg)));
            std::uint64_t i = 1 + qrng() % (n - len + 1);
            QueryStats st;
            idx.majorities(i, i + len - 1, tau, &st);
            total += static_cast<double>(st.sequence_ops() + st.accesses);
        }
        out.points.emplace_back(1.0 / tau, total / queries);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = static_cast<double>(out.points.size());
    for (auto [x, y] : out.points) {
        double lx = std::log(x), ly = std::log(y);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return out;
}

// ---- criterion 5

Outcome listing_equivalence() {
    Outcome o;
    gen::Rng rng(5);
    std::uint64_t checks = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::uint64_t n = 1 + rng() % 3000;
        std::uint32_t sigma = 1 + static_cast<std::uint32_t>(rng() % 300);
        auto s = gen::random_string(rng, n, sigma, rep % 2);
        WaveletSequence seq(s, sigma);
        auto c = previous_occurrences(s, sigma);
        auto full = ListingIndex::full(c);
        std::vector<ListingIndex> sparse;
        for (std::uint64_t g : {1, 2, 8, 64}) sparse.push_back(ListingIndex::sparsified(c, g));
        for (int q = 0; q < 30; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            auto collect = [&](const ListingIndex& l, QueryStats& st) {
                SequenceCells cells(seq, st);
                std::vector<Listed> got;
                l.for_each_distinct(cells, i, j, st, [&](std::uint32_t a, std::uint64_t p) {
                    got.push_back({a, p});
                    return true;
                });
                std::sort(got.begin(), got.end(), [](const Listed& x, const Listed& y) { return x.symbol < y.symbol; });
                return got;
            };
            QueryStats fs;
            auto want = collect(full, fs);
            auto truth = oracle::leftmost(s, i, j);
            bool same = want.size() == truth.size();
            for (auto& x : want) same = same && truth.count(x.symbol) && truth.at(x.symbol) == x.position;
            if (!same) o.fail("full listing differs from the oracle at [" + std::to_string(i) + ".." + std::to_string(j) + "]");
            for (auto& l : sparse) {
                QueryStats st;
                auto got = collect(l, st);
                ++checks;
                bool eq = got.size() == want.size();
                for (std::size_t k = 0; eq && k < got.size(); ++k) eq = got[k].symbol == want[k].symbol && got[k].position == want[k].position;
                if (!eq) o.fail("g=" + std::to_string(l.block_len()) + " differs at [" + std::to_string(i) + ".." + std::to_string(j) + "]");
                if (st.c_probes > l.block_len() * (2 * got.size() + 2))
                    o.fail("g=" + std::to_string(l.block_len()) + " probes " + std::to_string(st.c_probes) + " for " + std::to_string(got.size()));
            }
        }
    }
    o.detail = std::to_string(checks) + " sparsified listings compared";
    return o;
}

// ---- criterion 6

template <class K>
bool swar_exhaustive(std::uint64_t& count) {
    const unsigned k = K::k;
    std::uint64_t total = 1;
    for (unsigned m = 0; m < k; ++m) total *= k;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<std::uint32_t> full;
        for (std::uint64_t x = code, m = 0; m < k; ++m, x /= k) full.push_back(static_cast<std::uint32_t>(x % k));
        for (unsigned len = 1; len <= k; ++len) {
            std::vector<std::uint32_t> chunk(full.begin(), full.begin() + len);
            auto w = K::count_chunk(K::pack(chunk.begin(), chunk.end()));
            if (len < k) w = K::pad_correction(w, k - len);
            std::vector<std::uint64_t> want(k, 0);
            for (auto a : chunk) ++want[a];
            if (w.counts() != want) return false;
            for (std::uint64_t y = 1; y <= k + 1; ++y)
                for (Band band : {Band::low, Band::high, Band::both}) {
                    std::vector<unsigned> exp;
                    for (unsigned a = 0; a < k; ++a)
                        if ((band == Band::high && want[a] >= y) || (band == Band::low && want[a] >= 1 && want[a] < y) ||
                            (band == Band::both && want[a] >= 1))
                            exp.push_back(a);
                    ++count;
                    if (K::threshold_extract(w, y, band) != exp) return false;
                }
        }
    }
    return true;
}

template <class K>
bool swar_random(std::uint64_t seed, std::uint64_t& count) {
    gen::Rng rng(seed);
    for (int c = 0; c < 100000; ++c) {
        unsigned len = 1 + static_cast<unsigned>(rng() % K::k);
        std::vector<std::uint32_t> chunk(len);
        std::uint32_t hot = static_cast<std::uint32_t>(rng() % K::k);
        for (auto& a : chunk) a = rng() % 3 == 0 ? static_cast<std::uint32_t>(rng() % K::k) : hot;
        auto w = K::count_chunk(K::pack(chunk.begin(), chunk.end()));
        if (len < K::k) w = K::pad_correction(w, K::k - len);
        std::vector<std::uint64_t> want(K::k, 0);
        for (auto a : chunk) ++want[a];
        std::uint64_t y = 1 + rng() % (K::k + 1);
        std::vector<unsigned> exp;
        for (unsigned a = 0; a < K::k; ++a)
            if (want[a] >= y) exp.push_back(a);
        ++count;
        if (w.counts() != want || K::threshold_extract(w, y, Band::high) != exp) return false;
    }
    return true;
}

Outcome swar_kernel() {
    Outcome o;
    std::uint64_t exhaustive = 0, random = 0;
    if (!swar_exhaustive<Swar<2>>(exhaustive)) o.fail("sigma'=2 exhaustive mismatch");
    if (!swar_exhaustive<Swar<4>>(exhaustive)) o.fail("sigma'=4 exhaustive mismatch");
    if (!swar_random<Swar<8>>(61, random)) o.fail("sigma'=8 random mismatch");
    if (!swar_random<Swar<16>>(62, random)) o.fail("sigma'=16 random mismatch");
    o.detail = std::to_string(exhaustive) + " exhaustive and " + std::to_string(random) + " randomized threshold checks";
    return o;
}

// ---- criterion 7

struct SpaceResult {
    Outcome outcome;
    SpaceReport plain, compressed;
};

SpaceResult space() {
    SpaceResult r;
    gen::Rng rng(7);
    const std::uint64_t n = 1000000;
    auto s = gen::zipf_string(rng, n, 256, 1.3);
    RangeIndex compressed(s, 256, IndexConfig::compressed());
    r.compressed = compressed.space_report();
    RangeIndex plain(s, 256, IndexConfig::plain());
    r.plain = plain.space_report();
    double cap_c = 3.0 * r.compressed.nh0_bits() + 1048576, cap_p = 1.5 * r.plain.n_lg_sigma_bits() + 1048576;
    if (static_cast<double>(r.compressed.total_bits) > cap_c)
        r.outcome.fail("compressed " + std::to_string(r.compressed.total_bits) + " > " + std::to_string(cap_c));
    if (static_cast<double>(r.plain.total_bits) > cap_p)
        r.outcome.fail("plain " + std::to_string(r.plain.total_bits) + " > " + std::to_string(cap_p));
    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "compressed %llu bits = %.3f x nH0 (nH0 %.0f, H0 %.3f, cap %.0f); plain %llu bits = %.3f x n*ceil(lg sigma) (cap %.0f)",
                  static_cast<unsigned long long>(r.compressed.total_bits), r.compressed.ratio_to_nh0(), r.compressed.nh0_bits(),
                  r.compressed.h0, cap_c, static_cast<unsigned long long>(r.plain.total_bits), r.plain.ratio_to_n_lg_sigma(), cap_p);
    r.outcome.detail = buf;
    return r;
}

// ---- criterion 8

Outcome serialization() {
    Outcome o;
    gen::Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        std::uint64_t n = 1 + rng() % 5000;
        std::uint32_t sigma = 1 + static_cast<std::uint32_t>(rng() % 500);
        auto s = gen::random_string(rng, n, sigma, rep % 2);
        std::string bytes;
        for (auto a : s) bytes.append(reinterpret_cast<const char*>(&a), 4);
        IndexConfig cfg = rep % 3 == 0 ? IndexConfig::plain() : rep % 3 == 1 ? IndexConfig::compressed() : IndexConfig{};
        if (rep % 4 == 1) cfg.verify = Verify::check, cfg.sampled_families = true, cfg.chunk_len = 8;
        if (rep % 5 == 2) cfg.minority = MinorityStrategy::listing;
        auto file = IndexFile::build(bytes, InputFormat::u32le, cfg);
        auto image = file.serialize();
        auto back = IndexFile::parse(image);
        if (!(back.index == file.index) || !(back.remap == file.remap) || back.serialize() != image) {
            o.fail("corpus " + std::to_string(rep) + " does not round-trip bit-exactly");
            continue;
        }
        for (int q = 0; q < 100; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            double tau = 1.0 / static_cast<double>(1 + rng() % 64);
            if (back.index.majorities(i, j, tau) != file.index.majorities(i, j, tau) ||
                back.index.minority(i, j, tau) != file.index.minority(i, j, tau) || back.index.mode(i, j) != file.index.mode(i, j))
                o.fail("corpus " + std::to_string(rep) + " answers differ after loading");
        }
    }
    o.detail = "50 corpora x 100 queries";
    return o;
}

// ---- criterion 9

Outcome boundary() {
    Outcome o;
    gen::Rng rng(9);
    int built = 0;
    while (built < 1000) {
        // tau = p/q <= 1/2, range length q*m; symbol 1 occurs exactly p*m times, every other
        // symbol strictly more often, so symbol 1 is the only minority
        std::uint64_t q = 2 + rng() % 15, p = 1 + rng() % (q / 2), m = 1 + rng() % 40;
        double tau = static_cast<double>(p) / static_cast<double>(q);
        std::uint64_t len = q * m, occ = p * m, rest = len - occ;
        std::uint64_t fillers = std::max<std::uint64_t>(1, std::min<std::uint64_t>(1 + rng() % 4, rest / (occ + 1)));
        if (rest < fillers * (occ + 1)) continue;
        std::vector<std::uint32_t> body(occ, 1);
        for (std::uint64_t f = 0; f < fillers; ++f) {
            std::uint64_t c = rest / fillers + (f < rest % fillers);
            body.insert(body.end(), c, static_cast<std::uint32_t>(f + 2));
        }
        std::shuffle(body.begin(), body.end(), rng);
        std::uint32_t sigma = static_cast<std::uint32_t>(fillers + 1 + rng() % 8);
        std::uint64_t pre = rng() % 200, post = rng() % 200;
        std::vector<std::uint32_t> s;
        for (std::uint64_t k = 0; k < pre; ++k) s.push_back(1 + static_cast<std::uint32_t>(rng() % sigma));
        s.insert(s.end(), body.begin(), body.end());
        for (std::uint64_t k = 0; k < post; ++k) s.push_back(1 + static_cast<std::uint32_t>(rng() % sigma));
        std::uint64_t i = pre + 1, j = pre + len;
        if (static_cast<double>(occ) != tau * static_cast<double>(len)) continue;  // integral boundary only
        ++built;
        IndexConfig cfg;
        cfg.minority = built % 2 ? MinorityStrategy::flags : MinorityStrategy::listing;
        cfg.chunk_len = 4;
        RangeIndex idx(s, sigma, cfg);
        auto truth = oracle::minorities(s, i, j, tau);
        std::pair<std::uint32_t, std::uint64_t> expect{1, occ};
        if (truth.size() != 1 || truth[0] != expect) {
            o.fail("construction error at case " + std::to_string(built));
            continue;
        }
        for (Verify v : {Verify::rank, Verify::check}) {
            for (auto [a, c] : idx.majorities(i, j, tau, nullptr, v))
                if (a == 1) o.fail("boundary symbol reported as majority, " + range_text(s.size(), sigma, i, j, tau));
            if (idx.minority(i, j, tau, nullptr, v) != Found(expect))
                o.fail("boundary symbol not returned as minority, " + range_text(s.size(), sigma, i, j, tau));
        }
    }
    o.detail = "1000 constructed cases, both strategies and verify modes";
    return o;
}

int failures = 0;

void report(int id, const std::string& name, const Outcome& o, double seconds) {
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " - " << o.detail;
    if (!o.pass) std::cout << " - first failure: " << o.first_failure;
    std::printf(" (%.1f s)\n", seconds);
    std::cout.flush();
}

double since(std::chrono::steady_clock::time_point t) { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count(); }

}  // namespace

int main() {
    auto t = std::chrono::steady_clock::now();
    auto corpus = run_corpus();
    double corpus_s = since(t);
    corpus.majorities.detail = std::to_string(corpus.cases) + " cases x 2 verify modes";
    report(1, "majority oracle equivalence", corpus.majorities, corpus_s);
    corpus.minorities.detail = std::to_string(corpus.cases) + " cases x 2 strategies x 2 verify modes";
    report(2, "minority oracle equivalence", corpus.minorities, 0);

    t = std::chrono::steady_clock::now();
    auto slope = measure_slope();
    Outcome bounds = corpus.bounds;
    if (std::abs(slope.slope - 1.0) > 0.15) bounds.fail("log-log slope " + std::to_string(slope.slope));
    {
        std::ostringstream o;
        o.precision(3);
        o << "peak candidates " << corpus.worst_candidates << " and peak ops " << corpus.worst_ops
          << " of their bounds; slope of mean ops vs 1/tau on n=10^6 Zipf = " << slope.slope << " (";
        for (std::size_t k = 0; k < slope.points.size(); ++k) o << (k ? ", " : "") << slope.points[k].first << ":" << slope.points[k].second;
        o << ")";
        bounds.detail = o.str();
    }
    report(3, "candidate and work bounds", bounds, since(t));

    corpus.mode.detail = std::to_string(corpus.mode_cases) + " mode queries";
    report(4, "range mode and iteration bound", corpus.mode, 0);

    t = std::chrono::steady_clock::now();
    auto o5 = listing_equivalence();
    report(5, "full vs sparsified listing", o5, since(t));
    t = std::chrono::steady_clock::now();
    auto o6 = swar_kernel();
    report(6, "word-parallel kernel", o6, since(t));
    t = std::chrono::steady_clock::now();
    auto o7 = space().outcome;
    report(7, "space envelopes", o7, since(t));
    t = std::chrono::steady_clock::now();
    auto o8 = serialization();
    report(8, "serialization round trip", o8, since(t));
    t = std::chrono::steady_clock::now();
    auto o9 = boundary();
    report(9, "boundary strictness", o9, since(t));

    std::cout << (failures ? "acceptance: " + std::to_string(failures) + " criteria failed" : std::string("acceptance: all criteria pass"))
              << std::endl;
    return failures ? 1 : 0;
}
