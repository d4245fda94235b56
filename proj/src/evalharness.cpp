#include "fpguard/evalharness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <omp.h>
#include <random>
#include <sstream>

namespace fpguard {

namespace fs = std::filesystem;

std::string_view label_name(Label l) { return l == Label::Benign ? "benign" : "malicious"; }

std::size_t CorpusManifest::count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(), [l](const CorpusEntry& e) { return e.label == l; }));
}

CorpusManifest load_manifest(const fs::path& manifest_file) {
    auto bytes = read_file(manifest_file);
    std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    const auto root = manifest_file.parent_path();

    CorpusManifest m;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw SyntaxError(line_no, "expected path<TAB>label");
        auto path = std::string(trim(line.substr(0, tab)));
        auto label = trim(line.substr(tab + 1));
        CorpusEntry e;
        if (label == "benign") e.label = Label::Benign;
        else if (label == "malicious") e.label = Label::Malicious;
        else throw SyntaxError(line_no, "label must be benign or malicious");
        e.path_id = path;
        e.path = fs::path(path).is_absolute() ? fs::path(path) : root / path;
        for (const auto& other : m.entries) {
            if (other.path_id == e.path_id) throw SyntaxError(line_no, "duplicate path '" + path + "'");
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

std::string serialize_manifest(const CorpusManifest& m) {
    std::ostringstream out;
    for (const auto& e : m.entries) out << e.path_id << '\t' << label_name(e.label) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }
    std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(gen_() % n); }
    bool chance(std::size_t num, std::size_t den) { return below(den) < num; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

    std::string letters(std::size_t n, char base) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(base + below(26)));
        return s;
    }

private:
    std::mt19937_64 gen_;
};

const std::vector<std::string> kBenignStrings = {
    "usage: tool [options] <file>", "settings loaded", "error: file not found", "copyright 2024 example corp",
    "report.txt", "press any key to continue", "connecting to update server", "saved %d records",
    "the quick brown fox", "invalid argument", "config.ini", "welcome back",
};

const std::vector<std::string> kFiles = {"notes.txt", "data.db", "config.ini", "image.png", "report.doc", "cache.bin"};

Instruction op(Opcode o, std::string text = {}, std::int64_t n = 0) { return Instruction{o, std::move(text), n}; }

void add_filler(Rng& rng, Program& p) {
    std::size_t n = rng.below(3);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng.chance(1, 2)) p.code.push_back(op(Opcode::Set, "r" + std::to_string(rng.below(4)), static_cast<std::int64_t>(rng.below(1000))));
        else p.code.push_back(op(Opcode::Nop));
    }
}

void declare_used(Program& p) {
    for (const auto& ins : p.code) {
        if (auto k = behavior_of(ins.op)) p.abilities.declared.insert(*k);
    }
}

Program make_benign(Rng& rng, const std::string& name, bool tricky) {
    Program p;
    p.name = name;
    std::size_t nstr = 1 + rng.below(3);
    for (std::size_t i = 0; i < nstr; ++i) p.strings.push_back(rng.pick(kBenignStrings));

    add_filler(rng, p);
    const auto& file = rng.pick(kFiles);
    if (tricky) {
        // Disk formatter or driver installer: legitimate, declared, but its
        // runtime behavior looks virus-like on its own.
        p.code.push_back(op(Opcode::Open, rng.chance(1, 2) ? "disk0" : file));
        p.code.push_back(op(Opcode::Read));
        if (rng.chance(1, 2)) {
            p.code.push_back(op(Opcode::Format));
        } else {
            p.code.push_back(op(Opcode::MoveSys, "/system/drivers/" + name + ".sys"));
        }
        p.code.push_back(op(Opcode::Close));
    } else {
        switch (rng.below(4)) {
        case 0:  // viewer
            p.code.push_back(op(Opcode::Open, file));
            p.code.push_back(op(Opcode::Read));
            p.code.push_back(op(Opcode::Close));
            break;
        case 1:  // editor
            p.code.push_back(op(Opcode::Open, file));
            p.code.push_back(op(Opcode::Read));
            add_filler(rng, p);
            p.code.push_back(op(Opcode::Write));
            p.code.push_back(op(Opcode::Close));
            break;
        case 2:  // sync client
            p.code.push_back(op(Opcode::Open, file));
            p.code.push_back(op(Opcode::Read));
            p.code.push_back(op(Opcode::NetSend, {}, static_cast<std::int64_t>(64 + rng.below(1024))));
            p.code.push_back(op(Opcode::Close));
            break;
        default:  // archive tool with encryption
            p.code.push_back(op(Opcode::Open, file));
            p.code.push_back(op(Opcode::Read));
            p.code.push_back(op(Opcode::Decrypt));
            p.code.push_back(op(Opcode::Write));
            p.code.push_back(op(Opcode::Close));
            break;
        }
    }
    add_filler(rng, p);
    p.code.push_back(op(Opcode::Label, "done"));
    declare_used(p);
    return p;
}

struct Family {
    std::string marker;  // exact signature bytes
    std::string stub_head;
    std::string stub_tail;
};

Family make_family(Rng& rng) { return Family{rng.letters(16, 'A'), rng.letters(4, 'A'), rng.letters(4, 'A')}; }

SignatureDb family_db(const std::vector<Family>& families) {
    SignatureDb db;
    for (std::size_t f = 0; f < families.size(); ++f) {
        const auto& fam = families[f];
        char name[32];
        std::snprintf(name, sizeof name, "Fam%02zu.exact", f);
        db.exact.push_back(ExactSignature{name, to_bytes(fam.marker)});
        std::snprintf(name, sizeof name, "Fam%02zu.generic", f);
        GenericSignature g{name, {}};
        for (char c : fam.stub_head) g.tokens.push_back(PatternToken::byte(static_cast<std::uint8_t>(c)));
        g.tokens.push_back(PatternToken::gap(0, 8));
        for (char c : fam.stub_tail) g.tokens.push_back(PatternToken::byte(static_cast<std::uint8_t>(c)));
        db.generic.push_back(std::move(g));
    }
    return db;
}

Program infect(Rng& rng, const Program& host, const std::string& name, const Family& fam) {
    Program p = host;
    p.name = name;
    p.strings.push_back(fam.marker);
    p.strings.push_back(fam.stub_head + rng.letters(rng.below(7), 'a') + fam.stub_tail);
    if (rng.chance(1, 2)) p.strings.push_back("VIRUS inside");

    auto& code = p.code;
    switch (rng.below(5)) {
    case 0:  // worm: strips the manifest and spreads forever
        p.abilities.declared = {};
        code.push_back(op(Opcode::Label, "spread"));
        code.push_back(op(Opcode::CopySelf));
        code.push_back(op(Opcode::NetSend, {}, static_cast<std::int64_t>(512 + rng.below(4096))));
        code.push_back(op(Opcode::Jmp, "spread"));
        break;
    case 1:  // wiper
        code.push_back(op(Opcode::Format));
        code.push_back(op(Opcode::MoveSys, "/system/boot.bin"));
        break;
    case 2:  // dropper that rewrites the manifest to cover itself
        code.push_back(op(Opcode::Decrypt));
        code.push_back(op(Opcode::MoveSys, "/system/svc.bin"));
        declare_used(p);
        break;
    case 3:  // file infector
        code.push_back(op(Opcode::Open, "host.exe"));
        code.push_back(op(Opcode::Read));
        code.push_back(op(Opcode::Write));
        code.push_back(op(Opcode::CopySelf));
        break;
    default:  // stealth: only benign-looking behavior, manifest kept consistent
        code.push_back(op(Opcode::Open, "victim.doc"));
        code.push_back(op(Opcode::Read));
        code.push_back(op(Opcode::Write));
        declare_used(p);
        break;
    }
    return p;
}

}  // namespace

CorpusManifest generate_corpus(std::uint64_t seed, std::size_t n_benign, std::size_t n_malicious, const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir / "benign", ec);
    if (ec) throw IoError((out_dir / "benign").string(), ec.message());
    fs::create_directories(out_dir / "malicious", ec);
    if (ec) throw IoError((out_dir / "malicious").string(), ec.message());

    Rng rng(seed);
    CorpusManifest manifest;
    SignatureDb db;

    std::vector<std::pair<std::string, std::string>> benign;  // path_id, text
    for (std::size_t i = 0; i < n_benign; ++i) {
        char id[40];
        std::snprintf(id, sizeof id, "benign/b%04zu.spx", i);
        char name[32];
        std::snprintf(name, sizeof name, "benign_%04zu", i);
        benign.emplace_back(id, to_spx(make_benign(rng, name, i % 10 == 0)));
    }

    // Families whose markers or stubs would hit a benign file are redrawn.
    std::vector<Family> families;
    const std::size_t n_families = std::min<std::size_t>(5, n_malicious);
    for (std::size_t f = 0; f < n_families; ++f) {
        for (;;) {
            auto fam = make_family(rng);
            auto m = CompiledMatcher::compile(family_db({fam}));
            bool clean = std::none_of(benign.begin(), benign.end(),
                                      [&](const auto& b) { return !m.scan(as_bytes(b.second)).empty(); });
            if (clean) {
                families.push_back(std::move(fam));
                break;
            }
        }
    }
    db = family_db(families);

    for (const auto& [id, text] : benign) {
        write_file(out_dir / id, text);
        db.baselines.push_back(IntegrityRecord{id, digest_file(as_bytes(text))});
        manifest.entries.push_back(CorpusEntry{out_dir / id, id, Label::Benign});
    }

    for (std::size_t i = 0; i < n_malicious; ++i) {
        char id[40];
        std::snprintf(id, sizeof id, "malicious/m%04zu.spx", i);
        char name[32];
        std::snprintf(name, sizeof name, "host_%04zu", i);
        auto host = make_benign(rng, name, false);
        std::snprintf(name, sizeof name, "malicious_%04zu", i);
        auto infected = infect(rng, host, name, families[i % families.size()]);
        auto text = to_spx(infected);
        write_file(out_dir / id, text);
        db.baselines.push_back(IntegrityRecord{id, digest_file(as_bytes(to_spx(host)))});
        manifest.entries.push_back(CorpusEntry{out_dir / id, id, Label::Malicious});
    }

    write_file(out_dir / kManifestFile, serialize_manifest(manifest));
    write_file(out_dir / kCorpusDbFile, serialize_db(db));
    return manifest;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double Metrics::fp_rate() const {
    return benign() == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(benign());
}

double Metrics::fn_rate() const {
    return malicious() == 0 ? 0.0 : static_cast<double>(fn) / static_cast<double>(malicious());
}

double Metrics::throughput() const { return elapsed_s <= 0.0 ? 0.0 : static_cast<double>(scanned_bytes) / elapsed_s; }

namespace {

FileOutcome run_entry(const CorpusEntry& e, const Engine& engine) {
    auto data = read_file(e.path);
    auto v = engine.scan(e.path_id, data, is_spx_path(e.path));
    return FileOutcome{e.path_id, e.label, v.decision, data.size()};
}

}  // namespace

std::vector<FileOutcome> run_corpus_serial(const CorpusManifest& manifest, const Engine& engine) {
    std::vector<FileOutcome> out;
    out.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) out.push_back(run_entry(e, engine));
    return out;
}

std::vector<FileOutcome> run_corpus(const CorpusManifest& manifest, const Engine& engine, int jobs) {
    const auto& entries = manifest.entries;
    std::vector<FileOutcome> out(entries.size());
    std::vector<std::exception_ptr> errors(entries.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (std::size_t i = 0; i < entries.size(); ++i) {
        try {
            out[i] = run_entry(entries[i], engine);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Metrics tally(const std::vector<FileOutcome>& outcomes) {
    Metrics m;
    for (const auto& o : outcomes) {
        m.scanned_bytes += o.bytes;
        const bool alarm = o.decision == Decision::Infected;
        const bool suspicious = o.decision == Decision::Suspicious;
        if (o.label == Label::Benign) {
            if (alarm) ++m.fp;
            else ++m.tn;
            if (suspicious) ++m.suspicious_benign;
        } else {
            if (alarm) ++m.tp;
            else ++m.fn;
            if (suspicious) ++m.suspicious_malicious;
        }
    }
    return m;
}

namespace {

template <typename Run>
Metrics timed(Run&& run) {
    auto start = std::chrono::steady_clock::now();
    auto outcomes = run();
    auto stop = std::chrono::steady_clock::now();
    auto m = tally(outcomes);
    m.elapsed_s = std::chrono::duration<double>(stop - start).count();
    return m;
}

}  // namespace

Metrics evaluate(const CorpusManifest& manifest, const Engine& engine, int jobs) {
    return timed([&] { return run_corpus(manifest, engine, jobs); });
}

Metrics evaluate_serial(const CorpusManifest& manifest, const Engine& engine) {
    return timed([&] { return run_corpus_serial(manifest, engine); });
}

ThresholdTiers tiers_with(ThresholdTiers tiers, Tier selected, std::int64_t value) {
    switch (selected) {
    case Tier::Low: tiers.low = value; break;
    case Tier::Medium: tiers.medium = value; break;
    case Tier::High: tiers.high = value; break;
    }
    if (selected == Tier::Low) {
        tiers.medium = std::max(tiers.medium, value);
        tiers.high = std::max(tiers.high, tiers.medium);
    } else if (selected == Tier::Medium) {
        tiers.low = std::min(tiers.low, value);
        tiers.high = std::max(tiers.high, value);
    } else {
        tiers.medium = std::min(tiers.medium, value);
        tiers.low = std::min(tiers.low, tiers.medium);
    }
    return tiers;
}

std::vector<SweepRow> threshold_sweep(const CorpusManifest& manifest, const Engine& engine,
                                      const std::vector<std::int64_t>& thresholds, int jobs) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) throw Error("sweep thresholds must be ascending");
    std::vector<SweepRow> rows;
    for (auto t : thresholds) {
        auto e = engine.with_tiers(tiers_with(engine.profile().tiers, engine.options().tier, t));
        rows.push_back(SweepRow{t, evaluate(manifest, e, jobs)});
    }
    return rows;
}

ThroughputReport time_scan(const CorpusManifest& manifest, const Engine& engine, std::size_t repetitions, int jobs) {
    if (repetitions == 0) throw Error("repetitions must be >= 1");
    ThroughputReport r;
    std::vector<Decision> first;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
        auto start = std::chrono::steady_clock::now();
        auto outcomes = run_corpus(manifest, engine, jobs);
        auto stop = std::chrono::steady_clock::now();
        r.elapsed_s.push_back(std::chrono::duration<double>(stop - start).count());

        std::vector<Decision> decisions;
        std::size_t bytes = 0;
        for (const auto& o : outcomes) {
            decisions.push_back(o.decision);
            bytes += o.bytes;
        }
        if (rep == 0) {
            first = std::move(decisions);
            r.bytes_per_rep = bytes;
        } else if (decisions != first) {
            r.identical = false;
        }
    }
    auto sorted = r.elapsed_s;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                             : (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]) / 2.0;
    r.median_throughput = median <= 0.0 ? 0.0 : static_cast<double>(r.bytes_per_rep) / median;
    return r;
}

std::optional<MethodPreset> parse_preset(std::string_view s) {
    if (s == "integrity") return MethodPreset::IntegrityOnly;
    if (s == "exact") return MethodPreset::ExactOnly;
    if (s == "heuristic") return MethodPreset::HeuristicOnly;
    if (s == "mixed") return MethodPreset::Mixed;
    return std::nullopt;
}

std::string_view preset_name(MethodPreset p) {
    switch (p) {
    case MethodPreset::IntegrityOnly: return "integrity";
    case MethodPreset::ExactOnly: return "exact";
    case MethodPreset::HeuristicOnly: return "heuristic";
    case MethodPreset::Mixed: return "mixed";
    }
    return "?";
}

ScanOptions preset_options(MethodPreset preset, Tier tier, std::uint64_t budget) {
    ScanOptions o;
    o.tier = tier;
    o.budget = budget;
    switch (preset) {
    case MethodPreset::IntegrityOnly:
        o.methods = {EvidenceCategory::IntegrityModified};
        o.policy = CombinationPolicy{1, true, true};
        break;
    case MethodPreset::ExactOnly:
        o.methods = {EvidenceCategory::ExactSig};
        o.policy = CombinationPolicy{1, true, false};
        break;
    case MethodPreset::HeuristicOnly:
        o.methods = {EvidenceCategory::HeuristicStatic, EvidenceCategory::HeuristicDynamic};
        o.policy = CombinationPolicy{1, true, false};
        break;
    case MethodPreset::Mixed:
        o.methods = kAllMethods;
        o.policy = CombinationPolicy{2, true, false};
        break;
    }
    return o;
}

}  // namespace fpguard
