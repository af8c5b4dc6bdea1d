#include <gtest/gtest.h>

#include <cmath>

#include <rfq/majority.hpp>
#include <rfq/oracle.hpp>

#include "test_support.hpp"

using namespace rfq;

namespace {

struct Built {
    std::vector<std::uint32_t> s;
    std::uint32_t sigma;
    WaveletSequence seq;
    ListingIndex listing;
    MajorityIndex idx;

    Built(std::vector<std::uint32_t> str, std::uint32_t sig, MajorityConfig cfg = {})
        : s(std::move(str)), sigma(sig), seq(s, sig), listing(ListingIndex::full(previous_occurrences(s, sig))), idx(s, sig, cfg) {}

    Counted query(std::uint64_t i, std::uint64_t j, double tau, QueryStats& st, std::optional<Verify> v = {}) const {
        return idx.query(seq, &listing, i, j, tau, st, v);
    }
};

std::uint64_t inv_ceil(double tau) { return static_cast<std::uint64_t>(std::ceil(1.0 / tau)); }

// distinct symbols of a string with a given per-symbol count profile, shuffled
std::vector<std::uint32_t> with_counts(gen::Rng& rng, const std::vector<std::uint64_t>& counts) {
    std::vector<std::uint32_t> s;
    for (std::uint32_t a = 0; a < counts.size(); ++a) s.insert(s.end(), counts[a], a + 1);
    std::shuffle(s.begin(), s.end(), rng);
    return s;
}

}  // namespace

TEST(Majority, QueryExamples) {
    Built b(gen::example_string(), 5);
    QueryStats st;
    EXPECT_EQ(b.query(4, 8, 0.5, st), (Counted{{1, 3}}));
    EXPECT_EQ(b.query(1, 11, 1.0, st), Counted{});
    EXPECT_EQ(b.query(2, 2, 0.5, st), (Counted{{2, 1}}));
    EXPECT_THROW(b.query(0, 3, 0.5, st), RangeError);
    EXPECT_THROW(b.query(3, 12, 0.5, st), RangeError);
    EXPECT_THROW(b.query(1, 3, 0.0, st), DomainError);
    EXPECT_THROW(b.query(1, 3, 1.5, st), DomainError);
}

TEST(Majority, SequentialExamples) {
    WaveletSequence seq(gen::example_string());
    QueryStats st;
    EXPECT_EQ(sequential_majorities(seq, 1, 11, 0.25, st), (Counted{{1, 5}}));
    EXPECT_EQ(sequential_majorities(seq, 1, 11, 0.5, st), Counted{});
    WaveletSequence nines(std::vector<std::uint32_t>{9, 9, 9});
    EXPECT_EQ(sequential_majorities(nines, 1, 3, 0.99, st), (Counted{{9, 3}}));
}

TEST(Majority, CheckCandidateExamples) {
    WaveletSequence seq(gen::example_string());
    auto p = QueryParams::make(4, 8, 0.5, 11);
    QueryStats st;
    auto v = MajorityIndex::check_candidate(seq, 1, 4, p, st);
    EXPECT_TRUE(v.majority);
    EXPECT_EQ(st.partial_ranks, 1u);
    EXPECT_EQ(st.selects, 1u);
    EXPECT_FALSE(MajorityIndex::check_candidate(seq, 5, 7, p, st).majority);
    // threshold 0: any occurring symbol is a majority
    auto tiny = QueryParams::make(4, 8, 0.1, 11);
    EXPECT_TRUE(MajorityIndex::check_candidate(seq, 4, 5, tiny, st).majority);
    EXPECT_THROW(MajorityIndex::check_candidate(seq, 2, 4, p, st), DomainError);
}

TEST(Majority, ChunkSuccessorExamples) {
    MajorityConfig cfg;
    cfg.chunk_len = 2;
    Built b(gen::example_string(), 5, cfg);
    QueryStats st;
    // occurrences of 1: 1,4,6,8,11; the chunk ending at the 4th occurrence is {6,8}
    EXPECT_EQ(b.idx.chunk_successor(b.seq, 1, 8, 5, st), std::optional<std::uint64_t>(6));
    EXPECT_EQ(b.idx.chunk_successor(b.seq, 1, 8, 8, st), std::optional<std::uint64_t>(8));
    EXPECT_EQ(b.idx.chunk_successor(b.seq, 1, 8, 7, st), std::optional<std::uint64_t>(8));
    EXPECT_EQ(b.idx.chunk_successor(b.seq, 1, 8, 9, st), std::nullopt);
    // i before the chunk start: the successor lies in an earlier chunk
    EXPECT_EQ(b.idx.chunk_successor(b.seq, 1, 8, 2, st), std::nullopt);
}

TEST(Majority, ModeExamples) {
    Built b(gen::example_string(), 5);
    QueryStats st;
    EXPECT_EQ(b.idx.mode(b.seq, &b.listing, 1, 11, st), (std::pair<std::uint32_t, std::uint64_t>{1, 5}));
    EXPECT_LE(st.mode_iterations, 3u);
    st = {};
    EXPECT_EQ(b.idx.mode(b.seq, &b.listing, 3, 3, st), (std::pair<std::uint32_t, std::uint64_t>{3, 1}));
    EXPECT_LE(st.mode_iterations, 1u);
    Built u(std::vector<std::uint32_t>(300, 7), 7);
    st = {};
    EXPECT_EQ(u.idx.mode(u.seq, &u.listing, 20, 260, st), (std::pair<std::uint32_t, std::uint64_t>{7, 241}));
    EXPECT_EQ(st.mode_iterations, 1u);
}

TEST(Majority, GFamilyDefinition) {
    // a run of one symbol: with t = 0 every block flags its first and last position
    MajorityConfig cfg;
    cfg.dispatch = Dispatch::flagged;
    Built b(std::vector<std::uint32_t>(128, 1), 1, cfg);
    const auto& g = b.idx.families().at({0, 1}).g;
    EXPECT_EQ(g.ones(), 128u);
    const auto& g3 = b.idx.families().at({0, 3}).g;
    EXPECT_EQ(g3.ones(), 64u);
    EXPECT_TRUE(g3[0] && g3[3] && !g3[1] && !g3[2]);
    // all distinct: nothing occurs twice, so t = 0 flags nothing
    std::vector<std::uint32_t> distinct(100);
    for (std::uint32_t k = 0; k < 100; ++k) distinct[k] = k + 1;
    Built d(distinct, 100, cfg);
    for (unsigned bb = 1; bb <= 6; ++bb) EXPECT_EQ(d.idx.families().at({0, bb}).g.ones(), 0u);
}

TEST(Majority, NoFamiliesOnShortInputs) {
    Built b(gen::example_string(), 5);
    EXPECT_TRUE(b.idx.families().empty());
    MajorityConfig bad;
    bad.verify = Verify::check;
    bad.sampled_families = false;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad.sampled_families = true;
    bad.chunk_len = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

// Randomized equivalence with the brute-force oracle under every verification mode,
// dispatch policy and chunk length, with the candidate and work bounds on automatic dispatch.
TEST(Majority, MatchesOracle) {
    gen::Rng rng(401);
    const std::uint32_t sigmas[] = {2, 4, 16, 256, 1024};
    const std::uint64_t chunks[] = {2, 4, 16, 1024};
    for (int rep = 0; rep < 240; ++rep) {
        std::uint32_t sigma = sigmas[rep % 5];
        std::uint64_t n = 1 + rng() % (rep % 3 == 0 ? 2048 : 400);
        auto s = gen::random_string(rng, n, sigma, rep % 2);
        MajorityConfig cfg;
        cfg.chunk_len = chunks[rng() % 4];
        cfg.trade = rep % 4 == 3 ? 4 : 1;
        cfg.dispatch = static_cast<Dispatch>(rep % 7 == 5 ? 1 : rep % 7 == 6 ? 2 : 0);
        Built b(s, sigma, cfg);
        const double taus[] = {1, 0.9, 0.5, 0.2, 0.05, 1.0 / sigma, 0.5 / sigma};
        for (int q = 0; q < 40; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            double tau = taus[rng() % 7];
            auto want = oracle::majorities(s, i, j, tau);
            for (Verify v : {Verify::rank, Verify::check}) {
                QueryStats st;
                ASSERT_EQ(b.query(i, j, tau, st, v), want) << "n=" << n << " sigma=" << sigma << " [" << i << ".." << j << "] tau=" << tau
                                                           << " verify=" << static_cast<int>(v) << " chunk=" << cfg.chunk_len;
                if (cfg.dispatch != Dispatch::automatic) continue;
                std::uint64_t m = inv_ceil(tau);
                ASSERT_LE(st.candidates, 64 * m + (tau * sigma < 1 ? sigma : 0));
                ASSERT_LE(st.sequence_ops() + st.accesses, 64 * m * cfg.trade)
                    << "n=" << n << " sigma=" << sigma << " [" << i << ".." << j << "] tau=" << tau;
            }
        }
    }
}

TEST(Majority, ModeMatchesOracle) {
    gen::Rng rng(402);
    for (int rep = 0; rep < 60; ++rep) {
        std::uint32_t sigma = rep % 2 ? 8 : 300;
        std::uint64_t n = 1 + rng() % 1500;
        auto s = gen::random_string(rng, n, sigma, rep % 3 == 0);
        Built b(s, sigma);
        for (int q = 0; q < 30; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            QueryStats st;
            auto got = b.idx.mode(b.seq, &b.listing, i, j, st);
            auto want = oracle::mode(s, i, j);
            ASSERT_EQ(got, want);
            double ratio = static_cast<double>(j - i + 1) / static_cast<double>(want.second);
            ASSERT_LE(st.mode_iterations, static_cast<std::uint64_t>(std::ceil(std::log2(ratio))) + 1);
        }
    }
}

// occ = tau * len exactly: never a majority
TEST(Majority, BoundaryIsStrict) {
    gen::Rng rng(403);
    for (int rep = 0; rep < 200; ++rep) {
        std::uint64_t den = 1 + rng() % 8, len = den * (1 + rng() % 40), num = 1 + rng() % den;
        double tau = static_cast<double>(num) / static_cast<double>(den);
        std::uint64_t occ = len / den * num;
        if (occ == len) continue;
        std::vector<std::uint64_t> counts{occ};
        for (std::uint64_t rest = len - occ; rest > 0;) {
            std::uint64_t c = std::min<std::uint64_t>(rest, std::max<std::uint64_t>(1, occ / 2));
            counts.push_back(c);
            rest -= c;
        }
        auto s = with_counts(rng, counts);
        Built b(s, static_cast<std::uint32_t>(counts.size()));
        QueryStats st;
        for (Verify v : {Verify::rank, Verify::check}) {
            auto got = b.query(1, len, tau, st, v);
            for (auto [a, c] : got) ASSERT_NE(a, 1u);
            ASSERT_EQ(got, oracle::majorities(s, 1, len, tau));
        }
    }
}

TEST(Majority, DispatchPoliciesAgree) {
    gen::Rng rng(404);
    for (int rep = 0; rep < 20; ++rep) {
        std::uint32_t sigma = rep % 2 ? 4 : 64;
        std::uint64_t n = 200 + rng() % 1500;
        auto s = gen::random_string(rng, n, sigma, true);
        MajorityConfig a, b, c;
        b.dispatch = Dispatch::sequential;
        c.dispatch = Dispatch::flagged;
        c.chunk_len = 8;
        Built x(s, sigma, a), y(s, sigma, b), z(s, sigma, c);
        for (int q = 0; q < 50; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            double tau = 1.0 / static_cast<double>(1 + rng() % 20);
            QueryStats st;
            auto r = x.query(i, j, tau, st);
            ASSERT_EQ(r, y.query(i, j, tau, st));
            ASSERT_EQ(r, z.query(i, j, tau, st, Verify::check));
        }
    }
}

TEST(Majority, SaveLoadRoundTrip) {
    gen::Rng rng(405);
    auto s = gen::random_string(rng, 3000, 50, true);
    MajorityConfig cfg;
    cfg.chunk_len = 16;
    Built b(s, 50, cfg);
    Writer w;
    b.idx.save(w);
    Reader r(w.bytes());
    auto back = MajorityIndex::load(r);
    EXPECT_EQ(back, b.idx);
    for (int q = 0; q < 100; ++q) {
        auto [i, j] = gen::mixed_range(rng, 3000);
        QueryStats st;
        ASSERT_EQ(back.query(b.seq, &b.listing, i, j, 0.1, st, Verify::check), b.query(i, j, 0.1, st, Verify::check));
    }
}
