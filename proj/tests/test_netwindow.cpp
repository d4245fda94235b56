#include "fpguard/heuristics.hpp"
#include "fpguard/netwindow.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fpguard;

namespace {

std::vector<PacketRecord> burst(std::int64_t t0, std::int64_t spacing, int n) {
    std::vector<PacketRecord> out;
    for (int i = 0; i < n; ++i) out.push_back({t0 + i * spacing, "10.0.0.9", "10.1.0." + std::to_string(i), 60, 0xABCD});
    return out;
}

}  // namespace

TEST(NetWindow, ParseEmpty) { EXPECT_TRUE(parse_stream("").empty()); }

TEST(NetWindow, ParseThreeLines) {
    auto p = parse_stream("# t src dst size tag\n0\ta\tb\t10\t0x1f\n5\ta\tc\t20\tFF\n5\tb\ta\t30\t0\n");
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p[0].payload_tag, 0x1fu);
    EXPECT_EQ(p[1].payload_tag, 0xffu);
    EXPECT_EQ(p[2].size, 30u);
    EXPECT_EQ(parse_stream(serialize_stream(p)), p);
}

TEST(NetWindow, ParseErrors) {
    try {
        parse_stream("10\ta\tb\t1\t0\n5\ta\tb\t1\t0\n");
        FAIL();
    } catch (const NonMonotoneTime& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_stream("1\ta\tb\t1\n"), SyntaxError);
    EXPECT_THROW(parse_stream("x\ta\tb\t1\t0\n"), SyntaxError);
    EXPECT_THROW(parse_stream("1\ta\tb\t1\tzz\n"), SyntaxError);
}

TEST(NetWindow, EmptyStream) {
    EXPECT_TRUE(score_windows({}, 100, default_profile().weights).empty());
}

TEST(NetWindow, BurstWithinOneWindow) {
    auto pkts = burst(0, 10, 20);
    auto w = score_windows(pkts, 1000, default_profile().weights);
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w[0].features, (FeatureSet{Feature::FanoutHigh, Feature::PayloadRepeat}));
    EXPECT_EQ(w[0].counts, (WindowCounts{20, 20, 20}));
    EXPECT_EQ(w[0].net, 7);
}

TEST(NetWindow, HalvedWindowMissesBurst) {
    auto pkts = burst(0, 10, 20);
    auto w = score_windows(pkts, 100, default_profile().weights);
    ASSERT_EQ(w.size(), 2u);
    for (const auto& s : w) {
        EXPECT_EQ(s.counts.max_fanout, 10u);
        EXPECT_TRUE(s.features.empty());
    }
    EXPECT_FALSE(first_alarm(w).has_value());
}

TEST(NetWindow, EmptyWindowsIncluded) {
    std::vector<PacketRecord> p{{0, "a", "b", 1, 1}, {350, "a", "b", 1, 2}};
    auto w = score_windows(p, 100, default_profile().weights);
    ASSERT_EQ(w.size(), 4u);
    EXPECT_EQ(w[1].counts.packets, 0u);
    EXPECT_EQ(w[3].window_start, 300);
    EXPECT_EQ(format_windows(w), "0\t0\t-\n100\t0\t-\n200\t0\t-\n300\t0\t-\n");
}

TEST(NetWindow, RateSpike) {
    std::vector<PacketRecord> p;
    for (int i = 0; i < 101; ++i) p.push_back({i, "h" + std::to_string(i), "d", 1, static_cast<std::uint64_t>(i)});
    auto w = score_windows(p, 1000, default_profile().weights);
    EXPECT_EQ(w[0].features, FeatureSet{Feature::RateSpike});
    p.pop_back();
    EXPECT_TRUE(score_windows(p, 1000, default_profile().weights)[0].features.empty());
}

TEST(NetWindow, ParallelMatchesSerialAndMergedWindowsCountMore) {
    std::mt19937_64 rng(5);
    std::vector<PacketRecord> p;
    std::int64_t t = 0;
    for (int i = 0; i < 3000; ++i) {
        t += static_cast<std::int64_t>(rng() % 7);
        p.push_back({t, "s" + std::to_string(rng() % 4), "d" + std::to_string(rng() % 30), 1, rng() % 20});
    }
    const auto& w = default_profile().weights;
    for (std::int64_t win : {1, 50, 333, 1000, 100000}) {
        ASSERT_EQ(score_windows(p, win, w), score_windows_serial(p, win, w));
    }
    // Any packet range contains the counts of each of its sub-ranges.
    for (int i = 0; i < 200; ++i) {
        std::size_t a = rng() % p.size(), b = rng() % p.size();
        if (a > b) std::swap(a, b);
        std::size_t mid = a + (b - a) / 2;
        auto whole = count_window(p.data() + a, p.data() + b);
        auto left = count_window(p.data() + a, p.data() + mid);
        ASSERT_GE(whole.max_fanout, left.max_fanout);
        ASSERT_GE(whole.max_repeat, left.max_repeat);
        ASSERT_EQ(whole.packets, b - a);
    }
}

TEST(NetWindow, BadWindowLength) {
    EXPECT_THROW(score_windows(burst(0, 1, 3), 0, default_profile().weights), Error);
}
