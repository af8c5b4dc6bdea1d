#include <gtest/gtest.h>

#include <map>

#include <rfq/listing.hpp>
#include <rfq/oracle.hpp>

#include "test_support.hpp"

using namespace rfq;

namespace {

std::map<std::uint32_t, std::uint64_t> as_map(const std::vector<Listed>& v) {
    std::map<std::uint32_t, std::uint64_t> m;
    for (auto [a, p] : v) EXPECT_TRUE(m.emplace(a, p).second) << "symbol " << a << " listed twice";
    return m;
}

struct Fixture {
    std::vector<std::uint32_t> s;
    WaveletSequence seq;
    ListingIndex listing;
    Fixture(std::vector<std::uint32_t> str, std::uint64_t g) : s(std::move(str)), seq(s) {
        auto c = previous_occurrences(s, seq.sigma());
        listing = g == 0 ? ListingIndex::full(c) : ListingIndex::sparsified(c, g);
    }
    std::vector<Listed> list(std::uint64_t i, std::uint64_t j, std::uint64_t limit, QueryStats& st) const {
        SequenceCells cells(seq, st);
        return listing.list(cells, i, j, limit, st);
    }
};

}  // namespace

TEST(Listing, FullExamples) {
    Fixture f(gen::example_string(), 0);
    QueryStats st;
    auto got = as_map(f.list(4, 8, 10, st));
    std::map<std::uint32_t, std::uint64_t> want{{1, 4}, {4, 5}, {5, 7}};
    EXPECT_EQ(got, want);
    EXPECT_EQ(as_map(f.list(6, 6, 10, st)), (std::map<std::uint32_t, std::uint64_t>{{1, 6}}));
    auto two = f.list(1, 11, 2, st);
    ASSERT_EQ(two.size(), 2u);
    auto truth = oracle::leftmost(f.s, 1, 11);
    for (auto [a, p] : two) EXPECT_EQ(truth.at(a), p);
    EXPECT_THROW(f.list(5, 4, 1, st), RangeError);
    EXPECT_THROW(f.list(1, 12, 1, st), RangeError);
    EXPECT_THROW(f.list(0, 3, 1, st), RangeError);
}

TEST(Listing, FullOrderIsMinimumThenLeftThenRight) {
    // S = 2 1 2 3 1 over [2..5]: C = [0 0 1 0 2]; minimum of [2..5] is position 2,
    // then the left part is empty, then [3..5] gives position 4 then nothing new.
    Fixture f({2, 1, 2, 3, 1}, 0);
    QueryStats st;
    auto got = f.list(1, 5, 10, st);
    std::vector<Listed> want{{2, 1}, {1, 2}, {3, 4}};
    EXPECT_EQ(got, want);
}

TEST(Listing, SparsifiedExamples) {
    auto s = gen::example_string();
    auto c = previous_occurrences(s, 5);
    EXPECT_EQ(c, (std::vector<std::uint64_t>{0, 0, 0, 1, 0, 4, 0, 6, 2, 3, 8}));
    Fixture f(s, 4);
    ASSERT_EQ(f.listing.blocks(), 3u);
    EXPECT_EQ(f.listing.block_min(0), 0u);
    EXPECT_EQ(f.listing.block_min(1), 0u);
    EXPECT_EQ(f.listing.block_min(2), 2u);
    Fixture full(s, 0);
    QueryStats st;
    EXPECT_EQ(as_map(f.list(1, 11, 10, st)), as_map(full.list(1, 11, 10, st)));
    Fixture unary({1, 1, 1, 1}, 2);
    for (std::uint64_t i = 1; i <= 4; ++i)
        for (std::uint64_t j = i; j <= 4; ++j)
            EXPECT_EQ(as_map(unary.list(i, j, 10, st)), (std::map<std::uint32_t, std::uint64_t>{{1, i}}));
}

TEST(Listing, BlockMinimaMatchSequenceCValues) {
    gen::Rng rng(201);
    auto s = gen::random_string(rng, 3000, 64, true);
    for (std::uint64_t g : {1, 2, 8, 64}) {
        Fixture f(s, g);
        for (std::uint64_t b = 0; b < f.listing.blocks(); ++b) {
            std::uint64_t m = ~0ULL;
            for (std::uint64_t k = b * g + 1; k <= std::min<std::uint64_t>(s.size(), (b + 1) * g); ++k)
                m = std::min(m, f.seq.c_value(k));
            ASSERT_EQ(f.listing.block_min(b), m);
        }
    }
}

TEST(Listing, FullAndSparsifiedAgreeWithOracle) {
    gen::Rng rng(202);
    const std::uint32_t sigmas[] = {2, 4, 16, 256, 1024};
    for (int c = 0; c < 100; ++c) {
        std::size_t n = 1 + rng() % 2048;
        auto s = gen::random_string(rng, n, sigmas[c % 5], c % 2);
        Fixture full(s, 0);
        std::vector<Fixture> sparse;
        for (std::uint64_t g : {1, 2, 8, 64}) sparse.emplace_back(s, g);
        for (int q = 0; q < 20; ++q) {
            auto [i, j] = gen::mixed_range(rng, n);
            auto truth = oracle::leftmost(s, i, j);
            QueryStats st;
            auto want = as_map(full.list(i, j, n, st));
            ASSERT_EQ(want, truth);
            ASSERT_LE(st.listing_steps, 2 * truth.size() + 1);
            for (auto& f : sparse) {
                QueryStats ss;
                auto got = f.list(i, j, n, ss);
                ASSERT_EQ(as_map(got), truth) << "g=" << f.listing.block_len();
                ASSERT_LE(ss.c_probes, f.listing.block_len() * (2 * got.size() + 2));
            }
        }
    }
}

TEST(Listing, EarlyStopBoundsWork) {
    gen::Rng rng(203);
    auto s = gen::uniform_string(rng, 2000, 300);
    Fixture full(s, 0);
    std::vector<Fixture> sparse;
    for (std::uint64_t g : {2, 8, 64}) sparse.emplace_back(s, g);
    for (int q = 0; q < 200; ++q) {
        auto [i, j] = gen::random_range(rng, s.size());
        std::uint64_t limit = 1 + rng() % 20;
        auto truth = oracle::leftmost(s, i, j);
        QueryStats st;
        auto got = full.list(i, j, limit, st);
        ASSERT_EQ(got.size(), std::min<std::uint64_t>(limit, truth.size()));
        for (auto [a, p] : got) ASSERT_EQ(truth.at(a), p);
        ASSERT_LE(st.listing_steps, 4 * limit + 4);
        for (auto& f : sparse) {
            QueryStats ss;
            auto part = f.list(i, j, limit, ss);
            ASSERT_EQ(part.size(), got.size());
            for (auto [a, p] : part) ASSERT_EQ(truth.at(a), p);
            ASSERT_LE(ss.listing_steps, 4 * limit + 4);
            ASSERT_LE(ss.c_probes, f.listing.block_len() * (2 * part.size() + 2));
        }
    }
}

TEST(Listing, SparsifiedWithUnitBlocksMatchesFull) {
    gen::Rng rng(204);
    auto s = gen::zipf_string(rng, 1500, 40, 1.1);
    Fixture full(s, 0), unit(s, 1);
    for (int q = 0; q < 300; ++q) {
        auto [i, j] = gen::random_range(rng, s.size());
        QueryStats a, b;
        ASSERT_EQ(as_map(full.list(i, j, s.size(), a)), as_map(unit.list(i, j, s.size(), b)));
    }
}

TEST(Listing, ExplicitCellsOverSubsequence) {
    std::vector<std::uint64_t> sym{3, 1, 3, 2, 1};
    std::vector<std::uint64_t> prev{0, 0, 1, 0, 2};
    auto symbols = PackedInts::from(sym), links = PackedInts::from(prev);
    auto idx = ListingIndex::full(prev, 32);
    QueryStats st;
    ExplicitCells cells(symbols, links, st);
    auto got = as_map(idx.list(cells, 2, 5, 10, st));
    EXPECT_EQ(got, (std::map<std::uint32_t, std::uint64_t>{{1, 2}, {3, 3}, {2, 4}}));
}

TEST(Listing, RoundTrip) {
    gen::Rng rng(205);
    auto s = gen::random_string(rng, 1000, 30, false);
    auto c = previous_occurrences(s, 30);
    for (auto idx : {ListingIndex::full(c), ListingIndex::sparsified(c, 8)}) {
        Writer w;
        idx.save(w);
        Reader r(w.bytes());
        EXPECT_EQ(ListingIndex::load(r), idx);
    }
}
