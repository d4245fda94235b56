#pragma once

#include "fpguard/features.hpp"
#include "fpguard/spx.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fpguard {

inline constexpr std::uint64_t kDefaultStepBudget = 10'000;

struct BehaviorEvent {
    std::uint64_t step = 0;  // 0-based dispatch index of the emitting instruction
    BehaviorKind kind = BehaviorKind::Open;
    std::variant<std::monostate, std::string, std::int64_t> arg;

    bool operator==(const BehaviorEvent&) const = default;
};

enum class Termination { Halted, BudgetExhausted };

struct ExecutionTrace {
    std::vector<BehaviorEvent> events;
    std::uint64_t steps_executed = 0;
    Termination terminated = Termination::Halted;

    BehaviorSet kinds() const;
    bool operator==(const ExecutionTrace&) const = default;
};

/// Runs p on a purely symbolic machine: instructions only append events to
/// the returned trace and update emulator-local registers. Each dispatched
/// instruction (LABEL and NOP included) costs one step.
ExecutionTrace execute(const Program& p, std::uint64_t budget = kDefaultStepBudget);

/// Behavior kinds observed in t that p's manifest does not declare.
BehaviorSet diff_abilities(const Program& p, const ExecutionTrace& t);

/// DYN_* per observed kind, LOOPS_LONG on budget exhaustion and
/// ABILITY_VIOLATION when diff_abilities is non-empty.
FeatureSet extract_dynamic_features(const Program& p, const ExecutionTrace& t);

/// "step<TAB>kind<TAB>arg" per event.
std::string format_trace(const ExecutionTrace& t);

}  // namespace fpguard
