#pragma once

#include "fpguard/enum_set.hpp"
#include "fpguard/error.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

enum class EvidenceCategory : std::uint8_t {
    ExactSig,
    GenericSig,
    IntegrityModified,
    HeuristicStatic,
    HeuristicDynamic,
    AbilityViolation,
    NetworkAnomaly,
};

inline constexpr std::size_t kEvidenceCategoryCount = 7;
using CategorySet = EnumSet<EvidenceCategory, kEvidenceCategoryCount>;

std::string_view category_name(EvidenceCategory c);

enum class Strength { Confirming, Suggestive };

struct Evidence {
    EvidenceCategory category = EvidenceCategory::GenericSig;
    std::string detail;
    Strength strength = Strength::Suggestive;

    bool operator==(const Evidence&) const = default;
};

struct CombinationPolicy {
    std::uint32_t k_confirm = 2;
    bool exact_is_sufficient = true;
    bool integrity_alone_alarms = false;

    bool operator==(const CombinationPolicy&) const = default;
};

/// Ordered Clean < Suspicious < Infected.
enum class Decision { Clean, Suspicious, Infected };

std::string_view decision_name(Decision d);

struct Verdict {
    Decision decision = Decision::Clean;
    std::vector<Evidence> evidence;
    bool overridden_by_user = false;
};

class NotApplicable : public Error {
public:
    NotApplicable() : Error("feedback only applies to Suspicious verdicts") {}
};

/// Multi-evidence combination. Evidence is counted per distinct category, so
/// two generic-signature hits are one vote.
///
///  - Confirming evidence yields Infected. An exact-signature hit only counts
///    as confirming when exact_is_sufficient; otherwise it is one more
///    suggestive category.
///  - k_confirm distinct suggestive categories yield Infected, except that a
///    lone IntegrityModified never does unless integrity_alone_alarms (then
///    it is confirming).
///  - One or more suggestive categories short of that yield Suspicious.
///  - Otherwise Clean.
Verdict combine(std::vector<Evidence> evidence, const CombinationPolicy& policy);

/// Resolves a Suspicious verdict by the operator's answer.
Verdict apply_feedback(const Verdict& v, bool user_says_genuine);

/// "category(detail); ..." or "-" when there is no evidence.
std::string summarize_evidence(const std::vector<Evidence>& evidence);

}  // namespace fpguard
