#pragma once

// Registered heuristic feature universe. Static features come from SPX code
// inspection, dynamic ones from a sandbox trace, network ones from packet
// windows. DeclaredAll is the goodwill characteristic.

#include "fpguard/enum_set.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fpguard {

enum class Feature : std::uint8_t {
    // static
    OpenReadWriteSeq,
    StrVirus,
    HasCopySelf,
    HasFormat,
    HasMoveSys,
    HasDecrypt,
    UndeclaredOpcode,
    DeclaredAll,
    // dynamic
    LoopsLong,
    AbilityViolation,
    DynFormat,
    DynMoveSys,
    DynSelfCopy,
    DynNetSend,
    // network
    RateSpike,
    FanoutHigh,
    PayloadRepeat,
};

inline constexpr std::size_t kFeatureCount = 17;

using FeatureSet = EnumSet<Feature, kFeatureCount>;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "OPEN_READ_WRITE_SEQ", "STR_VIRUS",    "HAS_COPYSELF",      "HAS_FORMAT", "HAS_MOVESYS",
    "HAS_DECRYPT",         "UNDECLARED_OPCODE", "DECLARED_ALL", "LOOPS_LONG", "ABILITY_VIOLATION",
    "DYN_FORMAT",          "DYN_MOVESYS",  "DYN_SELFCOPY",      "DYN_NETSEND", "RATE_SPIKE",
    "FANOUT_HIGH",         "PAYLOAD_REPEAT",
};

inline constexpr FeatureSet kStaticFeatures{
    Feature::OpenReadWriteSeq, Feature::StrVirus,   Feature::HasCopySelf,      Feature::HasFormat,
    Feature::HasMoveSys,       Feature::HasDecrypt, Feature::UndeclaredOpcode, Feature::DeclaredAll,
};
inline constexpr FeatureSet kDynamicFeatures{
    Feature::LoopsLong, Feature::AbilityViolation, Feature::DynFormat,
    Feature::DynMoveSys, Feature::DynSelfCopy,     Feature::DynNetSend,
};
inline constexpr FeatureSet kNetworkFeatures{Feature::RateSpike, Feature::FanoutHigh, Feature::PayloadRepeat};

inline constexpr FeatureSet all_features() { return FeatureSet::from_bits((std::uint64_t{1} << kFeatureCount) - 1); }

inline std::string_view feature_name(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

inline std::optional<Feature> find_feature(std::string_view name) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        if (kFeatureNames[i] == name) return static_cast<Feature>(i);
    }
    return std::nullopt;
}

/// Names joined with sep, in registry order.
inline std::string join_features(FeatureSet set, std::string_view sep = ",") {
    std::string out;
    for (auto f : set) {
        if (!out.empty()) out += sep;
        out += feature_name(f);
    }
    return out;
}

}  // namespace fpguard
