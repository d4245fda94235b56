#pragma once

// SPX: a small line-oriented assembly standing in for executables.
//
//   ; comment
//   .name <id>
//   .abilities <Kind>...        Open Read Write Close Format MoveSys SelfCopy NetSend Decrypt
//   .str "<literal>"
//   OPEN "<path>" | READ | WRITE | CLOSE | FORMAT | MOVESYS "<path>" | COPYSELF
//   NETSEND <count> | DECRYPT | SET <reg> <value> | JMP <label> | LABEL <label> | NOP

#include "fpguard/enum_set.hpp"
#include "fpguard/error.hpp"
#include "fpguard/features.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

enum class BehaviorKind : std::uint8_t { Open, Read, Write, Close, Format, MoveSys, SelfCopy, NetSend, Decrypt };

inline constexpr std::size_t kBehaviorKindCount = 9;

using BehaviorSet = EnumSet<BehaviorKind, kBehaviorKindCount>;

std::string_view behavior_name(BehaviorKind k);
std::optional<BehaviorKind> find_behavior(std::string_view name);

enum class Opcode : std::uint8_t { Open, Read, Write, Close, Format, MoveSys, CopySelf, NetSend, Decrypt, Set, Jmp, Label, Nop };

std::string_view opcode_name(Opcode op);

/// Behavior an opcode exhibits when executed; SET/JMP/LABEL/NOP have none.
std::optional<BehaviorKind> behavior_of(Opcode op);

struct Instruction {
    Opcode op = Opcode::Nop;
    std::string text;     // OPEN/MOVESYS path, JMP/LABEL name, SET register
    std::int64_t number = 0;  // NETSEND count, SET value

    bool operator==(const Instruction&) const = default;
};

struct AbilityManifest {
    BehaviorSet declared;

    bool operator==(const AbilityManifest&) const = default;
};

inline constexpr std::size_t kMaxInstructions = 65536;

struct Program {
    std::string name;
    AbilityManifest abilities;
    std::vector<std::string> strings;
    std::vector<Instruction> code;

    bool operator==(const Program&) const = default;
};

class UnknownOpcode : public Error {
public:
    UnknownOpcode(std::size_t line, const std::string& op)
        : Error("line " + std::to_string(line) + ": unknown opcode '" + op + "'"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class UndefinedLabel : public Error {
public:
    explicit UndefinedLabel(const std::string& name) : Error("undefined label '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class TooLong : public Error {
public:
    TooLong() : Error("program exceeds " + std::to_string(kMaxInstructions) + " instructions") {}
};

Program parse_spx(std::string_view text);

/// Canonical SPX text; parse_spx(to_spx(p)) == p for any valid p.
std::string to_spx(const Program& p);

/// Static heuristic features from code order, string literals and the
/// ability manifest. A manifest is considered present when it declares at
/// least one kind; UNDECLARED_OPCODE and DECLARED_ALL are only evaluated
/// against a present manifest.
FeatureSet extract_static_features(const Program& p);

}  // namespace fpguard
