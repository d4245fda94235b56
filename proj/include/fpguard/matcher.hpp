#pragma once

#include "fpguard/bytes.hpp"
#include "fpguard/sigdb.hpp"

#include <array>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace fpguard {

enum class HitKind : std::uint8_t { Exact, Generic };

struct MatchHit {
    std::string signature_name;
    HitKind kind = HitKind::Exact;
    std::size_t offset = 0;
    std::size_t length = 0;

    bool operator==(const MatchHit&) const = default;
};

/// Orders hits by (offset, name), then kind and length.
bool hit_less(const MatchHit& a, const MatchHit& b);

/// Immutable scanning engine built from a SignatureDb.
///
/// Exact signatures go into an Aho-Corasick automaton expanded to a full
/// transition table, so a scan is one table lookup per input byte no matter
/// how many signatures are loaded. Generic signatures are bucketed by their
/// first two concrete bytes; only positions where that anchor pair occurs at
/// a feasible distance are handed to the wildcard matcher.
///
/// Every exact occurrence (overlaps included) is reported. Each generic
/// signature yields at most one hit: the leftmost start, and at that start
/// the shortest span.
class CompiledMatcher {
public:
    CompiledMatcher() = default;

    static CompiledMatcher compile(const SignatureDb& db);
    static CompiledMatcher compile(const std::vector<ExactSignature>& exact,
                                   const std::vector<GenericSignature>& generic);

    std::vector<MatchHit> scan(ByteView data) const;

    /// Same result as scan(); the buffer is split into overlapping chunks that
    /// are scanned on OpenMP threads.
    std::vector<MatchHit> scan_parallel(ByteView data, std::size_t chunk_size = 1 << 20) const;

    /// Reads the stream in chunk_size pieces, carrying max_span() bytes of
    /// overlap so no hit straddling a chunk boundary is lost.
    std::vector<MatchHit> scan_stream(std::istream& in, std::size_t chunk_size = 64 << 20) const;

    /// True if data contains any exact signature; stops at the first one.
    bool any_exact(ByteView data) const;

    /// Longest span any signature can match; the chunk overlap.
    std::size_t max_span() const noexcept { return max_span_; }
    std::size_t exact_count() const noexcept { return exact_names_.size(); }
    std::size_t generic_count() const noexcept { return generic_.size(); }
    std::size_t state_count() const noexcept { return exact_len_.empty() ? 0 : transitions_.size() / 256; }

private:
    struct RawHit {
        std::uint32_t sig;  // exact id, or exact_count + generic id
        std::size_t offset;
        std::size_t length;
    };

    struct GenericEntry {
        std::string name;
        std::vector<PatternToken> tokens;
        std::uint32_t prefix_min = 0;  // bytes covered before the first concrete byte
        std::uint32_t prefix_max = 0;
    };

    struct AnchorGroup {
        std::uint8_t second = 0;
        std::uint32_t dist_min = 1;  // offset of 2nd concrete byte from the 1st
        std::uint32_t dist_max = 1;
        std::vector<std::uint32_t> sigs;
    };

    static constexpr std::uint32_t kOutputFlag = 0x8000'0000u;

    void build_automaton(const std::vector<ExactSignature>& exact);
    void build_generic(const std::vector<GenericSignature>& generic);

    // Reports hits starting before report_limit, offsets relative to data.
    void scan_exact(ByteView data, std::size_t report_limit, std::vector<RawHit>& out) const;
    void scan_generic(ByteView data, std::size_t report_limit, std::vector<RawHit>& out) const;
    std::vector<MatchHit> finish(std::vector<RawHit>& raw) const;

    // Exact side.
    std::vector<std::uint32_t> transitions_;  // state * 256 + byte -> next state | kOutputFlag
    std::vector<std::uint32_t> out_begin_;    // CSR offsets into out_ids_, one per state + 1
    std::vector<std::uint32_t> out_ids_;
    std::vector<std::string> exact_names_;
    std::vector<std::uint32_t> exact_len_;

    // Generic side.
    std::vector<GenericEntry> generic_;
    std::array<std::vector<AnchorGroup>, 256> anchors_{};

    std::size_t max_span_ = 0;
};

/// Shortest span of tokens matching data starting exactly at start, if any.
std::optional<std::size_t> match_pattern_at(const std::vector<PatternToken>& tokens, ByteView data,
                                            std::size_t start);

inline std::vector<MatchHit> scan_bytes(const CompiledMatcher& m, ByteView data) { return m.scan(data); }

}  // namespace fpguard
