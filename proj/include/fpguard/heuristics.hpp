#pragma once

#include "fpguard/error.hpp"
#include "fpguard/features.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

/// Per-feature weight W_i, or goodwill credit for trust-indicating features.
/// A feature id appears in at most one of the two maps.
class FeatureWeights {
public:
    void set_weight(Feature f, std::int64_t w);
    void set_goodwill(Feature f, std::int64_t credit);

    std::optional<std::int64_t> weight(Feature f) const { return weights_[idx(f)]; }
    std::optional<std::int64_t> goodwill(Feature f) const { return goodwill_[idx(f)]; }

    FeatureSet weighted() const;
    FeatureSet goodwill_features() const;

    bool operator==(const FeatureWeights&) const = default;

private:
    static std::size_t idx(Feature f) { return static_cast<std::size_t>(f); }

    std::array<std::optional<std::int64_t>, kFeatureCount> weights_{};
    std::array<std::optional<std::int64_t>, kFeatureCount> goodwill_{};
};

enum class Tier { Low, Medium, High };

std::string_view tier_name(Tier t);
std::optional<Tier> parse_tier(std::string_view s);

struct ThresholdTiers {
    std::int64_t low = 0;
    std::int64_t medium = 0;
    std::int64_t high = 0;

    std::int64_t at(Tier t) const;
    bool operator==(const ThresholdTiers&) const = default;
};

struct HeuristicScore {
    std::int64_t raw = 0;
    std::int64_t credit = 0;
    std::int64_t net = 0;
    FeatureSet triggered;           // weighted features present
    FeatureSet goodwill_triggered;  // goodwill features present

    bool operator==(const HeuristicScore&) const = default;
};

enum class HeuristicClass { Benign, Suspicious };

class UnknownFeature : public Error {
public:
    UnknownFeature(std::size_t line, const std::string& id)
        : Error((line ? "line " + std::to_string(line) + ": " : std::string()) + "unknown feature '" + id + "'"),
          id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class NonMonotoneTiers : public Error {
public:
    NonMonotoneTiers(std::int64_t lo, std::int64_t mid, std::int64_t hi)
        : Error("thresholds must satisfy low <= medium <= high, got " + std::to_string(lo) + " " +
                std::to_string(mid) + " " + std::to_string(hi)) {}
};

struct WeightProfile {
    FeatureWeights weights;
    ThresholdTiers tiers;
};

/// Parses the .avw format: `FEATURE <id> <weight>`, `GOODWILL <id> <credit>`,
/// `THRESHOLD <low> <medium> <high>`, '#' comments.
WeightProfile load_weights(std::string_view text);
std::string serialize_weights(const WeightProfile& profile);

/// The profile shipped with the engine (also data/default.avw).
std::string_view default_profile_text();
const WeightProfile& default_profile();

/// Weighted sum over the triggered features minus goodwill credit, clamped
/// at zero. Features with no entry in either map contribute nothing.
HeuristicScore score(FeatureSet features, const FeatureWeights& w);

/// Name-based entry point; throws UnknownFeature for an unregistered id.
HeuristicScore score(const std::vector<std::string>& feature_ids, const FeatureWeights& w);

HeuristicClass classify_tier(const HeuristicScore& s, const ThresholdTiers& tiers, Tier tier);

}  // namespace fpguard
