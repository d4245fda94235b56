// Acceptance gate: one PASS/FAIL line per criterion. Exit status is non-zero
// if any criterion fails.

#include "fpguard/evalharness.hpp"
#include "fpguard/integrity.hpp"
#include "fpguard/matcher.hpp"
#include "fpguard/netwindow.hpp"
#include "fpguard/sandbox.hpp"
#include "fpguard/sigselect.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

using namespace fpguard;
using testing_support::TempDir;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr double kEvalMaxSeconds = 10.0;
constexpr double kMatcherMaxSeconds = 60.0;
constexpr std::size_t kExactCases = 10'000;
constexpr std::size_t kGenericCases = 500;
constexpr std::size_t kIntegrityFiles = 1'000;
constexpr std::size_t kSandboxPairs = 1'000;
constexpr std::size_t kSelectCases = 100;
constexpr double kMinRecall = 0.95;
constexpr double kMinThroughputMBps = 50.0;
constexpr double kMaxSlowdown = 3.0;
constexpr std::size_t kThroughputBytes = 100u << 20;
constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kBenign = 200;
constexpr std::size_t kMalicious = 50;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

Engine corpus_engine(const std::filesystem::path& dir, ScanOptions o = {}) {
    auto bytes = read_file(dir / kCorpusDbFile);
    return Engine(parse_db(std::string(bytes.begin(), bytes.end())), default_profile(), o);
}

const std::filesystem::path& seeded_corpus() {
    static TempDir dir("acceptance_corpus");
    static bool ready = false;
    if (!ready) {
        generate_corpus(kSeed, kBenign, kMalicious, dir.path());
        ready = true;
    }
    return dir.path();
}

Outcome fp_rate_fidelity() {
    auto t0 = Clock::now();
    TempDir dir("c1");
    auto manifest = generate_corpus(kSeed, kBenign, kMalicious, dir.path());
    auto engine = corpus_engine(dir.path());
    auto m = evaluate(manifest, engine);
    double elapsed = seconds_since(t0);
    auto r = oracle::replay(manifest, engine);
    bool counts = m.tp == r.tp && m.fp == r.fp && m.tn == r.tn && m.fn == r.fn;
    bool denom = m.benign() == kBenign && r.benign == kBenign;
    double expected_rate = static_cast<double>(r.fp) / static_cast<double>(kBenign);
    std::ostringstream d;
    d << "tp=" << m.tp << " fp=" << m.fp << " tn=" << m.tn << " fn=" << m.fn << " replay=" << r.tp << "/" << r.fp << "/"
      << r.tn << "/" << r.fn << " denominator=" << m.benign() << " fp_rate=" << m.fp_rate() << " elapsed=" << elapsed << "s";
    return {counts && denom && m.fp_rate() == expected_rate && elapsed < kEvalMaxSeconds, d.str()};
}

Outcome matcher_equivalence() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    std::size_t exact_bad = 0, generic_bad = 0, exact_hits = 0, generic_hits = 0;
    for (std::size_t i = 0; i < kExactCases; ++i) {
        unsigned alphabet = 2 + rng() % 6;
        std::vector<ExactSignature> sigs;
        for (std::size_t k = 0, n = 1 + rng() % 12; k < n; ++k) {
            sigs.push_back({"s" + std::to_string(k), testing_support::random_bytes(rng, 1 + rng() % 8, alphabet)});
        }
        auto data = testing_support::random_bytes(rng, rng() % 512, alphabet);
        auto got = CompiledMatcher::compile(sigs, {}).scan(data);
        exact_hits += got.size();
        exact_bad += got != oracle::sorted(oracle::naive_exact(sigs, data));
    }
    for (std::size_t i = 0; i < kGenericCases; ++i) {
        unsigned alphabet = 2 + rng() % 4;
        std::vector<GenericSignature> sigs;
        for (std::size_t k = 0, n = 1 + rng() % 6; k < n; ++k) {
            sigs.push_back({"g" + std::to_string(k), testing_support::random_pattern(rng, alphabet)});
        }
        std::size_t len = i % 50 == 0 ? 64u << 10 : rng() % 2048;
        auto data = testing_support::random_bytes(rng, len, alphabet);
        auto got = CompiledMatcher::compile({}, sigs).scan(data);
        generic_hits += got.size();
        generic_bad += got != oracle::sorted(oracle::backtrack_generic(sigs, data));
    }
    double elapsed = seconds_since(t0);
    std::ostringstream d;
    d << "exact discrepancies=" << exact_bad << "/" << kExactCases << " (" << exact_hits << " hits), generic discrepancies="
      << generic_bad << "/" << kGenericCases << " (" << generic_hits << " hits), elapsed=" << elapsed << "s";
    return {exact_bad == 0 && generic_bad == 0 && elapsed < kMatcherMaxSeconds, d.str()};
}

Outcome integrity_claim() {
    TempDir dir("c3");
    std::mt19937_64 rng(3003);
    std::vector<std::filesystem::path> files;
    for (std::size_t i = 0; i < kIntegrityFiles; ++i) {
        auto p = dir / ("d" + std::to_string(i % 10) + "/f" + std::to_string(i) + ".bin");
        std::filesystem::create_directories(p.parent_path());
        write_file(p, testing_support::random_bytes(rng, 1 + rng() % 4096));
        files.push_back(p);
    }
    auto store = build_baseline(dir.path());
    std::size_t unmodified_flagged = 0, flips_caught = 0;
    for (const auto& f : files) {
        if (store.check(make_path_id(dir.path(), f), read_file(f)) != IntegrityStatus::Unmodified) ++unmodified_flagged;
    }
    for (const auto& f : files) {
        auto data = read_file(f);
        data[rng() % data.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        write_file(f, data);
        if (store.check(make_path_id(dir.path(), f), read_file(f)) == IntegrityStatus::Modified) ++flips_caught;
    }
    std::ostringstream d;
    d << "records=" << store.size() << " unmodified flagged=" << unmodified_flagged << " flips detected=" << flips_caught << "/"
      << files.size();
    return {store.size() == kIntegrityFiles && unmodified_flagged == 0 && flips_caught == kIntegrityFiles, d.str()};
}

Outcome threshold_tradeoff() {
    auto manifest = load_manifest(seeded_corpus() / kManifestFile);
    auto engine = corpus_engine(seeded_corpus(), preset_options(MethodPreset::HeuristicOnly, Tier::Medium));
    auto rows = threshold_sweep(manifest, engine, {2, 4, 6, 8, 10, 12});
    bool monotone = true, fp_drop = false, fn_rise = false;
    std::ostringstream d;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        d << rows[i].threshold << ":fp=" << rows[i].metrics.fp << ",fn=" << rows[i].metrics.fn << " ";
        if (i == 0) continue;
        monotone &= rows[i].metrics.fp <= rows[i - 1].metrics.fp && rows[i].metrics.fn >= rows[i - 1].metrics.fn;
        fp_drop |= rows[i].metrics.fp < rows[i - 1].metrics.fp;
        fn_rise |= rows[i].metrics.fn > rows[i - 1].metrics.fn;
    }
    return {monotone && fp_drop && fn_rise, d.str()};
}

Outcome mixed_dominance() {
    auto manifest = load_manifest(seeded_corpus() / kManifestFile);
    auto run = [&](MethodPreset p, Tier t) { return evaluate(manifest, corpus_engine(seeded_corpus(), preset_options(p, t))); };
    auto integrity = run(MethodPreset::IntegrityOnly, Tier::Medium);
    auto exact = run(MethodPreset::ExactOnly, Tier::Medium);
    auto heuristic = run(MethodPreset::HeuristicOnly, Tier::Low);
    auto mixed = run(MethodPreset::Mixed, Tier::Low);
    std::ostringstream d;
    d << "fp integrity=" << integrity.fp << " exact=" << exact.fp << " heuristic(low)=" << heuristic.fp
      << " mixed(k=2,low)=" << mixed.fp << " mixed recall=" << mixed.recall();
    bool ok = integrity.fp == 0 && exact.fp == 0 && heuristic.fp >= 1 && mixed.fp < heuristic.fp && mixed.recall() >= kMinRecall;
    return {ok, d.str()};
}

Outcome verdict_exhaustive() {
    std::size_t cases = 0, bad = 0;
    for (unsigned bits = 0; bits < (1u << kEvidenceCategoryCount); ++bits) {
        for (std::uint32_t k = 1; k <= 3; ++k) {
            CombinationPolicy p;
            p.k_confirm = k;
            std::vector<Evidence> ev;
            std::set<EvidenceCategory> cats;
            for (unsigned i = 0; i < kEvidenceCategoryCount; ++i) {
                if (!(bits & (1u << i))) continue;
                auto c = static_cast<EvidenceCategory>(i);
                cats.insert(c);
                ev.push_back({c, "x", c == EvidenceCategory::ExactSig ? Strength::Confirming : Strength::Suggestive});
            }
            ++cases;
            bad += combine(ev, p).decision != oracle::decide(cats, p);
        }
    }
    std::ostringstream d;
    d << "cases=" << cases << " mismatches=" << bad;
    return {cases == 384 && bad == 0, d.str()};
}

Program looping_program(std::mt19937_64& rng, std::size_t i) {
    auto p = testing_support::random_program(rng, i);
    if (rng() % 2 == 0 || p.code.empty()) return p;
    auto at = rng() % (p.code.size() + 1);
    p.code.insert(p.code.begin() + static_cast<std::ptrdiff_t>(at), Instruction{Opcode::Label, "loop", 0});
    auto jmp = rng() % (p.code.size() + 1);
    p.code.insert(p.code.begin() + static_cast<std::ptrdiff_t>(jmp), Instruction{Opcode::Jmp, "loop", 0});
    return p;
}

Outcome sandbox_guarantees() {
    std::mt19937_64 rng(7007);
    std::vector<Program> programs;
    for (std::size_t i = 0; i < kSandboxPairs; ++i) programs.push_back(looping_program(rng, i));
    auto manifest = load_manifest(seeded_corpus() / kManifestFile);
    for (const auto& e : manifest.entries) {
        auto b = read_file(e.path);
        programs.push_back(parse_spx(std::string(b.begin(), b.end())));
    }

    std::size_t over_budget = 0, nondeterministic = 0, diff_bad = 0, violation_bad = 0, exhausted = 0;
    for (std::size_t i = 0; i < programs.size(); ++i) {
        const auto& p = programs[i];
        auto a = execute(p), b = execute(p), c = execute(p);
        over_budget += a.steps_executed > kDefaultStepBudget;
        exhausted += a.terminated == Termination::BudgetExhausted;
        nondeterministic += !(a == b && b == c && format_trace(a) == format_trace(c));
        if (i >= kSandboxPairs) continue;
        std::vector<BehaviorKind> events, declared;
        for (const auto& e : a.events) events.push_back(e.kind);
        for (auto k : p.abilities.declared) declared.push_back(k);
        auto want = oracle::set_difference(events, declared);
        auto got = diff_abilities(p, a);
        diff_bad += std::set<BehaviorKind>(got.begin(), got.end()) != want;
        violation_bad += extract_dynamic_features(p, a).contains(Feature::AbilityViolation) == want.empty();
    }
    std::ostringstream d;
    d << "programs=" << programs.size() << " (budget-exhausted " << exhausted << ") over budget=" << over_budget
      << " nondeterministic=" << nondeterministic << " diff mismatches=" << diff_bad << "/" << kSandboxPairs
      << " violation mismatches=" << violation_bad;
    return {over_budget == 0 && nondeterministic == 0 && diff_bad == 0 && violation_bad == 0 && exhausted > 0, d.str()};
}

Outcome selection_guarantee() {
    std::mt19937_64 rng(8008);
    std::size_t cases = 0, nonzero = 0, hits = 0, attempts = 0;
    while (cases < kSelectCases && attempts < 10 * kSelectCases) {
        ++attempts;
        auto sample = testing_support::random_bytes(rng, 256, 4);
        // Every block but a few is planted in some benign file, so only the
        // withheld ones can score zero.
        std::set<std::size_t> withheld;
        for (std::size_t k = 0, n = 1 + rng() % 3; k < n; ++k) withheld.insert(8 * (rng() % 31));
        std::vector<Bytes> corpus;
        for (int f = 0; f < 12; ++f) {
            auto file = testing_support::random_bytes(rng, 2048, 4);
            for (std::size_t off = 0; off + 16 <= sample.size(); off += 8) {
                if (withheld.count(off) || rng() % 2 == 0) continue;
                auto at = rng() % (file.size() - 16);
                std::copy_n(sample.begin() + static_cast<std::ptrdiff_t>(off), 16, file.begin() + static_cast<std::ptrdiff_t>(at));
            }
            corpus.push_back(std::move(file));
        }
        auto cands = extract_candidates(sample, 16, 8);
        bool zero_exists = std::any_of(cands.begin(), cands.end(), [&](const Candidate& c) {
            return std::none_of(corpus.begin(), corpus.end(), [&](const Bytes& f) { return oracle::contains(f, c.bytes); });
        });
        if (!zero_exists) continue;
        ++cases;
        auto best = select_signature(score_candidates(cands, corpus));
        nonzero += best.score() != 0.0;

        SignatureDb db;
        db.exact.push_back({"existing", Bytes{0xFF, 0xFE, 0xFD, 0xFC, 0xFB}});
        db.exact.push_back(to_exact_signature(best, "selected"));
        auto matcher = CompiledMatcher::compile(parse_db(serialize_db(db)));
        for (const auto& f : corpus) {
            for (const auto& h : matcher.scan(f)) hits += h.signature_name == "selected";
        }
    }
    std::ostringstream d;
    d << "cases=" << cases << " (attempts " << attempts << ") nonzero scores=" << nonzero << " benign hits=" << hits;
    return {cases == kSelectCases && nonzero == 0 && hits == 0, d.str()};
}

Outcome network_tradeoff() {
    auto bytes = read_file(FPGUARD_DATA_DIR "/worm_burst.pkt");
    auto pkts = parse_stream(std::string(bytes.begin(), bytes.end()));
    const auto& w = default_profile().weights;
    auto fanout_at = [&](std::int64_t win) {
        for (const auto& s : score_windows(pkts, win, w)) {
            if (s.features.contains(Feature::FanoutHigh)) return true;
        }
        return false;
    };
    bool at1000 = fanout_at(1000), at250 = fanout_at(250);
    std::ostringstream d;
    d << "FANOUT_HIGH W=1000:" << (at1000 ? "yes" : "no") << " W=250:" << (at250 ? "yes" : "no") << " alarms";
    bool monotone = true;
    std::optional<std::int64_t> prev;
    for (std::int64_t win : {250, 500, 1000, 2000}) {
        auto a = first_alarm(score_windows(pkts, win, w));
        d << " " << win << "->" << (a ? std::to_string(*a) : "none");
        if (!a || (prev && *a <= *prev)) monotone = false;
        prev = a;
    }
    return {at1000 && !at250 && monotone, d.str()};
}

Outcome throughput_bar() {
    std::mt19937_64 rng(10010);
    Bytes data(kThroughputBytes);
    for (std::size_t i = 0; i + 8 <= data.size(); i += 8) {
        auto v = rng();
        std::memcpy(data.data() + i, &v, 8);
    }
    auto make = [&](std::size_t n) {
        std::vector<ExactSignature> sigs;
        for (std::size_t i = 0; i < n; ++i) sigs.push_back({"t" + std::to_string(i), testing_support::random_bytes(rng, 16)});
        return CompiledMatcher::compile(sigs, {});
    };
    auto measure = [&](const CompiledMatcher& m) {
        double best = 1e300;
        for (int rep = 0; rep < 2; ++rep) {
            auto t0 = Clock::now();
            auto hits = m.scan(data);
            best = std::min(best, seconds_since(t0));
            if (!hits.empty()) std::abort();
        }
        return static_cast<double>(data.size()) / (1 << 20) / best;
    };
    auto big = make(1000), small = make(10);
    double mbps_big = measure(big), mbps_small = measure(small);
    std::ostringstream d;
    d << "1000 sigs: " << mbps_big << " MB/s, 10 sigs: " << mbps_small << " MB/s, ratio=" << mbps_small / mbps_big;
    return {mbps_big >= kMinThroughputMBps && mbps_small / mbps_big <= kMaxSlowdown, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"fp-rate formula fidelity", fp_rate_fidelity},
        {"matcher oracle equivalence", matcher_equivalence},
        {"integrity nil false positives", integrity_claim},
        {"threshold tradeoff", threshold_tradeoff},
        {"mixed-method dominance", mixed_dominance},
        {"verdict k-of-n exhaustiveness", verdict_exhaustive},
        {"sandbox guarantees", sandbox_guarantees},
        {"signature selection fp guarantee", selection_guarantee},
        {"network window tradeoff", network_tradeoff},
        {"throughput bar", throughput_bar},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
