#pragma once

// Signature database: exact signatures, wildcard (generic) signatures and
// integrity baselines, stored in the line-oriented .avdb text format:
//
//   AVDB <version>
//   EXACT <name> <hexbytes>
//   GENERIC <name> <tok> <tok> ...      tok := HH | ?? | * | *{m-n}
//   HASH <path_id> <sha256-hex>
//
// '#' starts a comment; blank lines are ignored.

#include "fpguard/bytes.hpp"
#include "fpguard/error.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

using Digest = std::array<std::uint8_t, 32>;

inline constexpr std::size_t kMinExactLength = 4;
inline constexpr std::uint32_t kMaxGap = 64;
inline constexpr std::uint32_t kDefaultStarGap = 16;

struct ExactSignature {
    std::string name;
    Bytes bytes;

    bool operator==(const ExactSignature&) const = default;
};

struct PatternToken {
    enum class Kind : std::uint8_t { Byte, AnyByte, Gap };

    Kind kind = Kind::Byte;
    std::uint8_t value = 0;
    std::uint32_t gap_min = 0;
    std::uint32_t gap_max = 0;

    static constexpr PatternToken byte(std::uint8_t v) { return {Kind::Byte, v, 0, 0}; }
    static constexpr PatternToken any() { return {Kind::AnyByte, 0, 0, 0}; }
    static constexpr PatternToken gap(std::uint32_t lo, std::uint32_t hi) { return {Kind::Gap, 0, lo, hi}; }

    /// Minimum and maximum number of data bytes this token consumes.
    constexpr std::uint32_t min_width() const { return kind == Kind::Gap ? gap_min : 1; }
    constexpr std::uint32_t max_width() const { return kind == Kind::Gap ? gap_max : 1; }

    bool operator==(const PatternToken&) const = default;
};

struct GenericSignature {
    std::string name;
    std::vector<PatternToken> tokens;

    /// Longest data span any alignment of this pattern can cover.
    std::size_t max_span() const;

    bool operator==(const GenericSignature&) const = default;
};

struct IntegrityRecord {
    std::string path_id;
    Digest digest{};

    bool operator==(const IntegrityRecord&) const = default;
};

struct SignatureDb {
    std::uint32_t version = 1;
    std::vector<ExactSignature> exact;
    std::vector<GenericSignature> generic;
    std::vector<IntegrityRecord> baselines;

    bool empty() const { return exact.empty() && generic.empty() && baselines.empty(); }

    bool operator==(const SignatureDb&) const = default;
};

class DuplicateName : public Error {
public:
    DuplicateName(std::size_t line, const std::string& name)
        : Error("line " + std::to_string(line) + ": duplicate name '" + name + "'"), line_(line), name_(name) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t line_;
    std::string name_;
};

class InvalidPattern : public Error {
public:
    InvalidPattern(std::size_t line, const std::string& name, const std::string& reason)
        : Error("line " + std::to_string(line) + ": invalid pattern '" + name + "': " + reason),
          line_(line), name_(name), reason_(reason) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& name() const noexcept { return name_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string name_;
    std::string reason_;
};

bool is_valid_name(std::string_view name);
bool is_valid_path_id(std::string_view path_id);

/// Reason the token list violates a GenericSignature invariant, if any.
std::optional<std::string> check_pattern(const std::vector<PatternToken>& tokens);

/// Parses one GENERIC token (`4D`, `??`, `*`, `*{0-8}`).
std::optional<PatternToken> parse_token(std::string_view tok);
std::string format_token(const PatternToken& tok);

std::string digest_hex(const Digest& d);
std::optional<Digest> parse_digest(std::string_view hex);

SignatureDb parse_db(std::string_view text);
std::string serialize_db(const SignatureDb& db);

/// Checks every record and joint uniqueness invariant; throws the same error
/// types as parse_db (line 0 for in-memory databases).
void validate_db(const SignatureDb& db);

/// Copy of db with every record list in serialization order.
SignatureDb canonical(SignatureDb db);

}  // namespace fpguard
