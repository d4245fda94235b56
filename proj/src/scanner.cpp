#include "fpguard/scanner.hpp"

#include <algorithm>
#include <exception>
#include <omp.h>
#include <set>
#include <string_view>

namespace fpguard {

namespace fs = std::filesystem;

Engine::Engine(const SignatureDb& db, WeightProfile profile, ScanOptions options)
    : matcher_(std::make_shared<CompiledMatcher>(CompiledMatcher::compile(db))),
      baselines_(std::make_shared<BaselineStore>(BaselineStore::from_records(db.baselines))),
      profile_(std::move(profile)),
      options_(options) {}

Engine Engine::with_options(ScanOptions options) const {
    Engine e = *this;
    e.options_ = options;
    return e;
}

Engine Engine::with_tiers(ThresholdTiers tiers) const {
    Engine e = *this;
    e.profile_.tiers = tiers;
    return e;
}

namespace {

std::string join_names(const std::set<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ',';
        out += n;
    }
    return out;
}

std::string describe(const HeuristicScore& s) {
    return join_features(s.triggered, "+") + " net=" + std::to_string(s.net);
}

}  // namespace

std::vector<Evidence> Engine::collect_evidence(const std::string& path_id, ByteView data, bool is_spx) const {
    const auto& methods = options_.methods;
    std::vector<Evidence> evidence;

    if (methods.contains(EvidenceCategory::ExactSig) || methods.contains(EvidenceCategory::GenericSig)) {
        std::set<std::string> exact, generic;
        for (const auto& h : matcher_->scan(data)) {
            (h.kind == HitKind::Exact ? exact : generic).insert(h.signature_name);
        }
        if (!exact.empty() && methods.contains(EvidenceCategory::ExactSig))
            evidence.push_back({EvidenceCategory::ExactSig, join_names(exact), Strength::Confirming});
        if (!generic.empty() && methods.contains(EvidenceCategory::GenericSig))
            evidence.push_back({EvidenceCategory::GenericSig, join_names(generic), Strength::Suggestive});
    }

    if (methods.contains(EvidenceCategory::IntegrityModified) &&
        baselines_->check(path_id, data) == IntegrityStatus::Modified) {
        evidence.push_back({EvidenceCategory::IntegrityModified, path_id, Strength::Suggestive});
    }

    const bool wants_static = methods.contains(EvidenceCategory::HeuristicStatic);
    const bool wants_dynamic = methods.contains(EvidenceCategory::HeuristicDynamic);
    const bool wants_ability = methods.contains(EvidenceCategory::AbilityViolation);
    if (!is_spx || !(wants_static || wants_dynamic || wants_ability)) return evidence;

    Program program;
    try {
        program = parse_spx(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
    } catch (const Error& e) {
        throw ParseError(path_id, e.what());
    }

    const auto& tiers = profile_.tiers;
    auto heuristic = [&](FeatureSet features, EvidenceCategory category) {
        auto s = score(features, profile_.weights);
        if (classify_tier(s, tiers, options_.tier) == HeuristicClass::Suspicious) {
            auto strength = s.net >= tiers.high ? Strength::Confirming : Strength::Suggestive;
            evidence.push_back({category, describe(s), strength});
        }
    };

    if (wants_static) heuristic(extract_static_features(program), EvidenceCategory::HeuristicStatic);
    if (wants_dynamic || wants_ability) {
        auto trace = execute(program, options_.budget);
        if (wants_dynamic) heuristic(extract_dynamic_features(program, trace), EvidenceCategory::HeuristicDynamic);
        if (wants_ability) {
            auto diff = diff_abilities(program, trace);
            if (!diff.empty()) {
                std::string detail;
                for (auto k : diff) {
                    if (!detail.empty()) detail += ',';
                    detail += behavior_name(k);
                }
                evidence.push_back({EvidenceCategory::AbilityViolation, detail, Strength::Suggestive});
            }
        }
    }
    return evidence;
}

Verdict Engine::scan(const std::string& path_id, ByteView data, bool is_spx) const {
    return combine(collect_evidence(path_id, data, is_spx), options_.policy);
}

bool is_spx_path(const fs::path& p) { return p.extension() == ".spx"; }

std::vector<ScanTarget> collect_targets(const std::vector<fs::path>& inputs) {
    std::vector<ScanTarget> targets;
    for (const auto& input : inputs) {
        std::error_code ec;
        if (fs::is_directory(input, ec)) {
            for (const auto& file : list_regular_files(input)) targets.push_back({file, make_path_id(input, file)});
        } else if (fs::is_regular_file(input, ec)) {
            auto id = input.lexically_normal().generic_string();
            while (id.starts_with("./")) id.erase(0, 2);
            targets.push_back({input, id});
        } else {
            throw IoError(input.string(), "no such file or directory");
        }
    }
    std::stable_sort(targets.begin(), targets.end(),
                     [](const ScanTarget& a, const ScanTarget& b) { return a.path.generic_string() < b.path.generic_string(); });
    return targets;
}

ScanResult scan_target(const Engine& engine, const ScanTarget& target) {
    auto data = read_file(target.path);
    ScanResult r{target, engine.scan(target.path_id, data, is_spx_path(target.path)), data.size()};
    return r;
}

std::vector<ScanResult> scan_targets_serial(const Engine& engine, const std::vector<ScanTarget>& targets) {
    std::vector<ScanResult> results;
    results.reserve(targets.size());
    for (const auto& t : targets) results.push_back(scan_target(engine, t));
    return results;
}

std::vector<ScanResult> scan_targets(const Engine& engine, const std::vector<ScanTarget>& targets, int jobs) {
    std::vector<ScanResult> results(targets.size());
    std::vector<std::exception_ptr> errors(targets.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < targets.size(); ++i) {
        try {
            results[i] = scan_target(engine, targets[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace fpguard
