#include "fpguard/heuristics.hpp"

#include "fpguard/bytes.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace fpguard {

void FeatureWeights::set_weight(Feature f, std::int64_t w) {
    if (w < 0) throw Error("weight for " + std::string(feature_name(f)) + " must be >= 0");
    if (goodwill_[idx(f)]) throw Error(std::string(feature_name(f)) + " already has a goodwill credit");
    weights_[idx(f)] = w;
}

void FeatureWeights::set_goodwill(Feature f, std::int64_t credit) {
    if (credit < 0) throw Error("goodwill credit for " + std::string(feature_name(f)) + " must be >= 0");
    if (weights_[idx(f)]) throw Error(std::string(feature_name(f)) + " already has a weight");
    goodwill_[idx(f)] = credit;
}

FeatureSet FeatureWeights::weighted() const {
    FeatureSet s;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (weights_[i]) s.insert(static_cast<Feature>(i));
    return s;
}

FeatureSet FeatureWeights::goodwill_features() const {
    FeatureSet s;
    for (std::size_t i = 0; i < kFeatureCount; ++i)
        if (goodwill_[i]) s.insert(static_cast<Feature>(i));
    return s;
}

std::string_view tier_name(Tier t) {
    switch (t) {
    case Tier::Low: return "low";
    case Tier::Medium: return "medium";
    case Tier::High: return "high";
    }
    return "?";
}

std::optional<Tier> parse_tier(std::string_view s) {
    if (s == "low") return Tier::Low;
    if (s == "medium") return Tier::Medium;
    if (s == "high") return Tier::High;
    return std::nullopt;
}

std::int64_t ThresholdTiers::at(Tier t) const {
    switch (t) {
    case Tier::Low: return low;
    case Tier::Medium: return medium;
    case Tier::High: return high;
    }
    return high;
}

namespace {

std::optional<std::int64_t> parse_i64(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

constexpr std::string_view kDefaultProfile = R"(# Default heuristic profile.
# No single feature reaches the medium threshold on its own.
FEATURE HAS_COPYSELF 5
FEATURE DYN_SELFCOPY 6
FEATURE HAS_FORMAT 4
FEATURE DYN_FORMAT 5
FEATURE HAS_MOVESYS 3
FEATURE DYN_MOVESYS 4
FEATURE OPEN_READ_WRITE_SEQ 2
FEATURE STR_VIRUS 2
FEATURE HAS_DECRYPT 2
FEATURE DYN_NETSEND 2
FEATURE LOOPS_LONG 1
FEATURE ABILITY_VIOLATION 4
FEATURE UNDECLARED_OPCODE 2
FEATURE RATE_SPIKE 2
FEATURE FANOUT_HIGH 4
FEATURE PAYLOAD_REPEAT 3
GOODWILL DECLARED_ALL 4
THRESHOLD 4 7 11
)";

}  // namespace

WeightProfile load_weights(std::string_view text) {
    WeightProfile profile;
    bool have_threshold = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto fields = split_ws(trim(raw));
        if (fields.empty()) continue;

        if (fields[0] == "FEATURE" || fields[0] == "GOODWILL") {
            if (fields.size() != 3) throw SyntaxError(line_no, std::string(fields[0]) + " takes <id> <value>");
            auto f = find_feature(fields[1]);
            if (!f) throw UnknownFeature(line_no, std::string(fields[1]));
            auto v = parse_i64(fields[2]);
            if (!v || *v < 0) throw SyntaxError(line_no, "value must be a non-negative integer");
            auto& w = profile.weights;
            if (w.weight(*f) || w.goodwill(*f)) throw SyntaxError(line_no, "feature '" + std::string(fields[1]) + "' listed twice");
            if (fields[0] == "FEATURE") w.set_weight(*f, *v);
            else w.set_goodwill(*f, *v);
        } else if (fields[0] == "THRESHOLD") {
            if (fields.size() != 4) throw SyntaxError(line_no, "THRESHOLD takes <low> <medium> <high>");
            if (have_threshold) throw SyntaxError(line_no, "duplicate THRESHOLD");
            auto lo = parse_i64(fields[1]);
            auto mid = parse_i64(fields[2]);
            auto hi = parse_i64(fields[3]);
            if (!lo || !mid || !hi) throw SyntaxError(line_no, "thresholds must be integers");
            if (!(*lo <= *mid && *mid <= *hi)) throw NonMonotoneTiers(*lo, *mid, *hi);
            profile.tiers = ThresholdTiers{*lo, *mid, *hi};
            have_threshold = true;
        } else {
            throw SyntaxError(line_no, "unknown record '" + std::string(fields[0]) + "'");
        }
    }
    if (!have_threshold) throw SyntaxError(line_no, "missing THRESHOLD line");
    return profile;
}

std::string serialize_weights(const WeightProfile& profile) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        auto f = static_cast<Feature>(i);
        if (auto w = profile.weights.weight(f)) out << "FEATURE " << feature_name(f) << ' ' << *w << '\n';
    }
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        auto f = static_cast<Feature>(i);
        if (auto c = profile.weights.goodwill(f)) out << "GOODWILL " << feature_name(f) << ' ' << *c << '\n';
    }
    const auto& t = profile.tiers;
    out << "THRESHOLD " << t.low << ' ' << t.medium << ' ' << t.high << '\n';
    return out.str();
}

std::string_view default_profile_text() { return kDefaultProfile; }

const WeightProfile& default_profile() {
    static const WeightProfile profile = load_weights(kDefaultProfile);
    return profile;
}

HeuristicScore score(FeatureSet features, const FeatureWeights& w) {
    HeuristicScore s;
    for (auto f : features) {
        if (auto weight = w.weight(f)) {
            s.raw += *weight;
            s.triggered.insert(f);
        } else if (auto credit = w.goodwill(f)) {
            s.credit += *credit;
            s.goodwill_triggered.insert(f);
        }
    }
    s.net = std::max<std::int64_t>(0, s.raw - s.credit);
    return s;
}

HeuristicScore score(const std::vector<std::string>& feature_ids, const FeatureWeights& w) {
    FeatureSet set;
    for (const auto& id : feature_ids) {
        auto f = find_feature(id);
        if (!f) throw UnknownFeature(0, id);
        set.insert(*f);
    }
    return score(set, w);
}

HeuristicClass classify_tier(const HeuristicScore& s, const ThresholdTiers& tiers, Tier tier) {
    return s.net >= tiers.at(tier) ? HeuristicClass::Suspicious : HeuristicClass::Benign;
}

}  // namespace fpguard
