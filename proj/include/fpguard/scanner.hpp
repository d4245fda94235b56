#pragma once

#include "fpguard/heuristics.hpp"
#include "fpguard/integrity.hpp"
#include "fpguard/matcher.hpp"
#include "fpguard/sandbox.hpp"
#include "fpguard/sigdb.hpp"
#include "fpguard/verdict.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace fpguard {

class ParseError : public Error {
public:
    ParseError(const std::string& path, const std::string& reason) : Error(path + ": " + reason), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

inline constexpr CategorySet kAllMethods = CategorySet::from_bits((1u << kEvidenceCategoryCount) - 1);

struct ScanOptions {
    Tier tier = Tier::Medium;
    CombinationPolicy policy;
    CategorySet methods = kAllMethods;  // detection methods that may contribute evidence
    std::uint64_t budget = kDefaultStepBudget;
};

/// Everything needed to turn file bytes into a Verdict. Copies share the
/// compiled matcher and baseline store.
class Engine {
public:
    Engine(const SignatureDb& db, WeightProfile profile, ScanOptions options = {});

    std::vector<Evidence> collect_evidence(const std::string& path_id, ByteView data, bool is_spx) const;
    Verdict scan(const std::string& path_id, ByteView data, bool is_spx) const;

    const ScanOptions& options() const noexcept { return options_; }
    const WeightProfile& profile() const noexcept { return profile_; }
    const CompiledMatcher& matcher() const noexcept { return *matcher_; }
    const BaselineStore& baselines() const noexcept { return *baselines_; }

    Engine with_options(ScanOptions options) const;
    Engine with_tiers(ThresholdTiers tiers) const;

private:
    std::shared_ptr<const CompiledMatcher> matcher_;
    std::shared_ptr<const BaselineStore> baselines_;
    WeightProfile profile_;
    ScanOptions options_;
};

bool is_spx_path(const std::filesystem::path& p);

struct ScanTarget {
    std::filesystem::path path;
    std::string path_id;
};

struct ScanResult {
    ScanTarget target;
    Verdict verdict;
    std::size_t bytes = 0;
};

/// Expands directories recursively; output sorted by display path.
std::vector<ScanTarget> collect_targets(const std::vector<std::filesystem::path>& inputs);

/// Scans every target on OpenMP threads; results are in target order.
/// Rethrows the first failing target's error (in target order).
std::vector<ScanResult> scan_targets(const Engine& engine, const std::vector<ScanTarget>& targets, int jobs = 0);

/// Single-threaded reference for scan_targets.
std::vector<ScanResult> scan_targets_serial(const Engine& engine, const std::vector<ScanTarget>& targets);

ScanResult scan_target(const Engine& engine, const ScanTarget& target);

}  // namespace fpguard
