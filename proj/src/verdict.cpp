#include "fpguard/verdict.hpp"

namespace fpguard {

std::string_view category_name(EvidenceCategory c) {
    switch (c) {
    case EvidenceCategory::ExactSig: return "exact";
    case EvidenceCategory::GenericSig: return "generic";
    case EvidenceCategory::IntegrityModified: return "integrity";
    case EvidenceCategory::HeuristicStatic: return "heuristic-static";
    case EvidenceCategory::HeuristicDynamic: return "heuristic-dynamic";
    case EvidenceCategory::AbilityViolation: return "ability";
    case EvidenceCategory::NetworkAnomaly: return "network";
    }
    return "?";
}

std::string_view decision_name(Decision d) {
    switch (d) {
    case Decision::Clean: return "Clean";
    case Decision::Suspicious: return "Suspicious";
    case Decision::Infected: return "Infected";
    }
    return "?";
}

Verdict combine(std::vector<Evidence> evidence, const CombinationPolicy& policy) {
    bool confirmed = false;
    CategorySet suggestive;
    for (const auto& e : evidence) {
        bool confirming = e.strength == Strength::Confirming;
        if (e.category == EvidenceCategory::ExactSig) confirming = policy.exact_is_sufficient;
        if (e.category == EvidenceCategory::IntegrityModified && policy.integrity_alone_alarms) confirming = true;
        if (confirming) confirmed = true;
        else suggestive.insert(e.category);
    }

    const auto k = std::max<std::uint32_t>(policy.k_confirm, 1);
    const bool integrity_only = suggestive == CategorySet{EvidenceCategory::IntegrityModified};

    Verdict v;
    v.evidence = std::move(evidence);
    if (confirmed || (suggestive.size() >= k && !integrity_only)) v.decision = Decision::Infected;
    else if (!suggestive.empty()) v.decision = Decision::Suspicious;
    else v.decision = Decision::Clean;
    return v;
}

Verdict apply_feedback(const Verdict& v, bool user_says_genuine) {
    if (v.decision != Decision::Suspicious) throw NotApplicable();
    Verdict out = v;
    out.decision = user_says_genuine ? Decision::Clean : Decision::Infected;
    out.overridden_by_user = true;
    return out;
}

std::string summarize_evidence(const std::vector<Evidence>& evidence) {
    if (evidence.empty()) return "-";
    std::string out;
    for (const auto& e : evidence) {
        if (!out.empty()) out += "; ";
        out += category_name(e.category);
        out += '(';
        out += e.detail;
        out += ')';
    }
    return out;
}

}  // namespace fpguard
