#pragma once

#include "fpguard/scanner.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fpguard {

enum class Label { Benign, Malicious };

std::string_view label_name(Label l);

struct CorpusEntry {
    std::filesystem::path path;  // resolved location
    std::string path_id;         // path as written in the manifest; also the integrity key
    Label label = Label::Benign;
};

struct CorpusManifest {
    std::vector<CorpusEntry> entries;

    std::size_t count(Label l) const;
};

/// Manifest TSV: `path<TAB>label` with label benign|malicious. Relative paths
/// resolve against the manifest's directory.
CorpusManifest load_manifest(const std::filesystem::path& manifest_file);
std::string serialize_manifest(const CorpusManifest& m);

/// Files written by generate_corpus inside out_dir.
inline constexpr const char* kManifestFile = "manifest.tsv";
inline constexpr const char* kCorpusDbFile = "corpus.avdb";

/// Writes a labeled synthetic SPX corpus plus manifest.tsv and corpus.avdb
/// (family signatures and clean-host integrity baselines). Output depends
/// only on the arguments.
///
/// Benign programs declare exactly the abilities they use and carry no
/// family marker. Every tenth benign program is "tricky": a legitimate
/// format or system-install utility whose runtime behavior alone crosses the
/// low heuristic threshold. Malicious programs are infected copies of a
/// clean host: they embed their family's exact marker and a generic stub,
/// and differ from the baselined host digest.
CorpusManifest generate_corpus(std::uint64_t seed, std::size_t n_benign, std::size_t n_malicious,
                               const std::filesystem::path& out_dir);

struct Metrics {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::size_t suspicious_benign = 0;     // Suspicious on benign files (counted in tn)
    std::size_t suspicious_malicious = 0;  // Suspicious on malicious files (counted in fn)
    std::size_t scanned_bytes = 0;
    double elapsed_s = 0.0;

    std::size_t total() const { return tp + fp + tn + fn; }
    std::size_t benign() const { return fp + tn; }
    std::size_t malicious() const { return tp + fn; }
    /// fp / benign count; 0 when there are no benign files.
    double fp_rate() const;
    /// fn / malicious count; 0 when there are no malicious files.
    double fn_rate() const;
    double recall() const { return malicious() == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(malicious()); }
    double throughput() const;  // bytes per second
};

struct FileOutcome {
    std::string path_id;
    Label label = Label::Benign;
    Decision decision = Decision::Clean;
    std::size_t bytes = 0;
};

/// Verdicts for every manifest entry, in manifest order. Files are scanned
/// on OpenMP threads.
std::vector<FileOutcome> run_corpus(const CorpusManifest& manifest, const Engine& engine, int jobs = 0);
std::vector<FileOutcome> run_corpus_serial(const CorpusManifest& manifest, const Engine& engine);

/// FP = Infected on a benign file. FN = Clean or Suspicious on a malicious one.
Metrics tally(const std::vector<FileOutcome>& outcomes);

Metrics evaluate(const CorpusManifest& manifest, const Engine& engine, int jobs = 0);
Metrics evaluate_serial(const CorpusManifest& manifest, const Engine& engine);

struct SweepRow {
    std::int64_t threshold = 0;
    Metrics metrics;
};

/// Re-evaluates with the engine's selected tier set to each threshold in
/// turn (the other tiers are clamped to stay ordered). Thresholds must be
/// ascending.
std::vector<SweepRow> threshold_sweep(const CorpusManifest& manifest, const Engine& engine,
                                      const std::vector<std::int64_t>& thresholds, int jobs = 0);

/// Tiers with the selected tier replaced by value and the others clamped.
ThresholdTiers tiers_with(ThresholdTiers tiers, Tier selected, std::int64_t value);

struct ThroughputReport {
    std::vector<double> elapsed_s;
    std::size_t bytes_per_rep = 0;
    double median_throughput = 0.0;  // bytes per second
    bool identical = true;           // same verdicts on every repetition
};

ThroughputReport time_scan(const CorpusManifest& manifest, const Engine& engine, std::size_t repetitions, int jobs = 0);

/// Method subsets used for method-to-method comparisons.
enum class MethodPreset { IntegrityOnly, ExactOnly, HeuristicOnly, Mixed };

std::optional<MethodPreset> parse_preset(std::string_view s);
std::string_view preset_name(MethodPreset p);

/// Single-method presets alarm on their own finding (k_confirm 1, integrity
/// alarms alone); Mixed uses every method with k_confirm 2.
ScanOptions preset_options(MethodPreset preset, Tier tier, std::uint64_t budget = kDefaultStepBudget);

}  // namespace fpguard
