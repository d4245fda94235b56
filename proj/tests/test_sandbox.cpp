#include "fpguard/sandbox.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace fpguard;

TEST(Sandbox, NopsHalt) {
    auto t = execute(parse_spx("NOP\nNOP\n"));
    EXPECT_EQ(t.steps_executed, 2u);
    EXPECT_TRUE(t.events.empty());
    EXPECT_EQ(t.terminated, Termination::Halted);
}

TEST(Sandbox, InfiniteLoopHitsBudget) {
    auto t = execute(parse_spx("LABEL a\nJMP a\n"), 10);
    EXPECT_EQ(t.steps_executed, 10u);
    EXPECT_EQ(t.terminated, Termination::BudgetExhausted);
}

TEST(Sandbox, EventsInOrder) {
    auto t = execute(parse_spx("OPEN \"x\"\nREAD\nWRITE\nFORMAT\n"));
    ASSERT_EQ(t.events.size(), 4u);
    std::vector<BehaviorKind> kinds;
    for (const auto& e : t.events) kinds.push_back(e.kind);
    EXPECT_EQ(kinds, (std::vector<BehaviorKind>{BehaviorKind::Open, BehaviorKind::Read, BehaviorKind::Write, BehaviorKind::Format}));
    EXPECT_EQ(std::get<std::string>(t.events[0].arg), "x");
    EXPECT_EQ(t.events[3].step, 3u);
}

TEST(Sandbox, BudgetBoundary) {
    auto p = parse_spx("NOP\nNOP\n");
    EXPECT_EQ(execute(p, 2).terminated, Termination::Halted);
    auto t = execute(p, 1);
    EXPECT_EQ(t.steps_executed, 1u);
    EXPECT_EQ(t.terminated, Termination::BudgetExhausted);
    EXPECT_EQ(execute(Program{}, 1).terminated, Termination::Halted);
}

TEST(Sandbox, DiffAbilities) {
    auto p = parse_spx(".abilities Open Read Write\nOPEN\nREAD\nWRITE\n");
    EXPECT_TRUE(diff_abilities(p, execute(p)).empty());
    auto q = parse_spx("FORMAT\n");
    EXPECT_EQ(diff_abilities(q, execute(q)), BehaviorSet{BehaviorKind::Format});
}

TEST(Sandbox, DynamicFeatures) {
    auto p = parse_spx(".abilities NetSend\nLABEL top\nNETSEND 3\nCOPYSELF\nJMP top\n");
    auto t = execute(p, 100);
    auto f = extract_dynamic_features(p, t);
    EXPECT_EQ(f, (FeatureSet{Feature::LoopsLong, Feature::AbilityViolation, Feature::DynSelfCopy, Feature::DynNetSend}));
    EXPECT_EQ(std::get<std::int64_t>(t.events[0].arg), 3);
}

TEST(Sandbox, UnreachedCodeIsNotObserved) {
    auto p = parse_spx("JMP end\nFORMAT\nLABEL end\n");
    auto t = execute(p);
    EXPECT_TRUE(t.events.empty());
    EXPECT_EQ(t.steps_executed, 2u);
}

TEST(Sandbox, SetDifferenceOracle) {
    std::mt19937_64 rng(21);
    for (std::size_t i = 0; i < 1000; ++i) {
        auto p = testing_support::random_program(rng, i);
        auto t = execute(p);
        std::vector<BehaviorKind> events, declared;
        for (const auto& e : t.events) events.push_back(e.kind);
        for (auto k : p.abilities.declared) declared.push_back(k);
        auto want = oracle::set_difference(events, declared);
        auto got = diff_abilities(p, t);
        ASSERT_EQ(std::set<BehaviorKind>(got.begin(), got.end()), want);
        ASSERT_EQ(extract_dynamic_features(p, t).contains(Feature::AbilityViolation), !want.empty());
    }
}

TEST(Sandbox, Deterministic) {
    std::mt19937_64 rng(23);
    for (std::size_t i = 0; i < 100; ++i) {
        auto p = testing_support::random_program(rng, i);
        auto a = execute(p, 50);
        EXPECT_EQ(execute(p, 50), a);
        EXPECT_EQ(format_trace(execute(p, 50)), format_trace(a));
    }
}

TEST(Sandbox, TraceFormat) {
    auto t = execute(parse_spx("NOP\nOPEN \"f\"\nREAD\nNETSEND 7\n"));
    EXPECT_EQ(format_trace(t), "1\tOpen\tf\n2\tRead\t\n3\tNetSend\t7\n");
}
