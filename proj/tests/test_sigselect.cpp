#include "fpguard/sigselect.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace fpguard;

TEST(SigSelect, BoundaryCandidate) {
    auto c = extract_candidates(Bytes(16, 7), 16, 8);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].offset, 0u);
}

TEST(SigSelect, StrideOffsets) {
    std::mt19937_64 rng(1);
    auto c = extract_candidates(testing_support::random_bytes(rng, 32), 16, 8);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].offset, 0u);
    EXPECT_EQ(c[1].offset, 8u);
    EXPECT_EQ(c[2].offset, 16u);
}

TEST(SigSelect, DedupVersusBruteForce) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        Bytes block = testing_support::random_bytes(rng, 16, 3);
        Bytes sample;
        for (int i = 0, n = 2 + static_cast<int>(rng() % 5); i < n; ++i) {
            if (rng() % 2) sample.insert(sample.end(), block.begin(), block.end());
            else {
                auto r = testing_support::random_bytes(rng, 16, 2);
                sample.insert(sample.end(), r.begin(), r.end());
            }
        }
        std::size_t stride = 1 + rng() % 16;
        auto got = extract_candidates(sample, 16, stride);
        std::vector<Bytes> seen;
        std::vector<std::size_t> offsets;
        for (std::size_t off = 0; off + 16 <= sample.size(); off += stride) {
            Bytes b(sample.begin() + static_cast<std::ptrdiff_t>(off), sample.begin() + static_cast<std::ptrdiff_t>(off + 16));
            if (std::find(seen.begin(), seen.end(), b) == seen.end()) {
                seen.push_back(b);
                offsets.push_back(off);
            }
        }
        ASSERT_EQ(got.size(), seen.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].bytes, seen[i]);
            EXPECT_EQ(got[i].offset, offsets[i]);
        }
    }
}

TEST(SigSelect, Errors) {
    EXPECT_THROW(extract_candidates(Bytes(15, 0), 16, 8), SampleTooShort);
    EXPECT_THROW(extract_candidates(Bytes(32, 0), 3, 8), Error);
    EXPECT_THROW(extract_candidates(Bytes(32, 0), 16, 0), Error);
    EXPECT_THROW(score_candidates({Candidate{Bytes(16, 0), 0, 0, 0}}, {}), EmptyCorpus);
    EXPECT_THROW(select_signature({}), NoCandidates);
}

TEST(SigSelect, Scores) {
    Bytes needle = to_bytes("0123456789abcdef");
    std::vector<Bytes> ten(10, to_bytes("nothing to see here, nothing at all"));
    auto s = score_candidates({Candidate{needle, 0, 0, 0}}, ten);
    EXPECT_EQ(s[0].score(), 0.0);
    std::vector<Bytes> four{to_bytes("xx0123456789abcdefxx"), to_bytes("no"), to_bytes("0123456789abcdef"), to_bytes("no")};
    s = score_candidates({Candidate{needle, 0, 0, 0}}, four);
    EXPECT_EQ(s[0].benign_hits, 2u);
    EXPECT_DOUBLE_EQ(s[0].score(), 0.5);
}

TEST(SigSelect, ScoresMatchNaiveContainment) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Bytes> corpus;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 12); i < n; ++i) corpus.push_back(testing_support::random_bytes(rng, rng() % 400, 2));
        auto sample = testing_support::random_bytes(rng, 64 + rng() % 64, 2);
        auto cands = extract_candidates(sample, 4 + rng() % 4, 1 + rng() % 5);
        auto scored = score_candidates(cands, corpus);
        ASSERT_EQ(scored, score_candidates_serial(cands, corpus));
        for (const auto& c : scored) {
            std::size_t hits = 0;
            for (const auto& f : corpus) hits += oracle::contains(f, c.bytes);
            ASSERT_EQ(c.benign_hits, hits);
            ASSERT_EQ(c.corpus_size, corpus.size());
        }
    }
}

TEST(SigSelect, Argmin) {
    auto mk = [](std::size_t off, std::size_t hits, std::size_t n) { return Candidate{Bytes(16, static_cast<std::uint8_t>(off)), off, hits, n}; };
    EXPECT_EQ(select_signature({mk(0, 2, 4), mk(8, 0, 4), mk(16, 1, 4)}).offset, 8u);
    EXPECT_EQ(select_signature({mk(8, 0, 4), mk(0, 0, 4)}).offset, 0u);
}

TEST(SigSelect, ZeroScoreWheneverAvailable) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Bytes> corpus;
        for (int i = 0; i < 8; ++i) corpus.push_back(testing_support::random_bytes(rng, 200, 2));
        auto sample = testing_support::random_bytes(rng, 96, 2);
        auto scored = score_candidates(extract_candidates(sample, 8, 4), corpus);
        bool has_zero = std::any_of(scored.begin(), scored.end(), [](const Candidate& c) { return c.benign_hits == 0; });
        auto best = select_signature(scored);
        for (const auto& c : scored) ASSERT_LE(best.score(), c.score());
        if (has_zero) ASSERT_EQ(best.benign_hits, 0u);
    }
}

TEST(SigSelect, ToExact) {
    auto sig = to_exact_signature(Candidate{to_bytes("ABCD"), 0, 0, 1}, "picked");
    EXPECT_EQ(sig.name, "picked");
    EXPECT_EQ(sig.bytes, to_bytes("ABCD"));
}
