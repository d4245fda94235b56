// fpguard: command-line front end for the scanning engine and the evaluation
// harness. Exit codes: 0 all clean, 1 infection found, 3 suspicious only,
// 2 operational error.

#include "fpguard/evalharness.hpp"
#include "fpguard/heuristics.hpp"
#include "fpguard/integrity.hpp"
#include "fpguard/netwindow.hpp"
#include "fpguard/sandbox.hpp"
#include "fpguard/scanner.hpp"
#include "fpguard/sigdb.hpp"
#include "fpguard/sigselect.hpp"
#include "fpguard/spx.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fpguard;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitInfected = 1;
constexpr int kExitError = 2;
constexpr int kExitSuspicious = 3;

std::string text_of(const fs::path& p) {
    auto bytes = read_file(p);
    return {bytes.begin(), bytes.end()};
}

/// Prefixes parse diagnostics with the file they came from.
template <typename F>
auto with_file(const fs::path& p, F&& parse) {
    try {
        return parse(text_of(p));
    } catch (const IoError&) {
        throw;
    } catch (const Error& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

struct EngineFlags {
    std::string db_path;
    std::string weights_path;
    std::string tier = "medium";
    std::string methods;
    std::uint32_t k_confirm = 2;
    bool no_exact_sufficient = false;
    bool integrity_alarms = false;
    std::uint64_t budget = kDefaultStepBudget;
    int jobs = 0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--db", db_path, "Signature database (.avdb); defaults to $FPGUARD_DB");
        cmd->add_option("--weights", weights_path, "Heuristic weights (.avw); defaults to the built-in profile");
        cmd->add_option("--tier", tier, "Heuristic threshold tier")->check(CLI::IsMember({"low", "medium", "high"}));
        cmd->add_option("--methods", methods, "Method preset: integrity, exact, heuristic or mixed")
            ->check(CLI::IsMember({"integrity", "exact", "heuristic", "mixed"}));
        cmd->add_option("--k-confirm", k_confirm, "Distinct suggestive categories needed to confirm")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--no-exact-sufficient", no_exact_sufficient, "Treat exact hits as suggestive evidence");
        cmd->add_flag("--integrity-alarms", integrity_alarms, "Let an integrity mismatch alone confirm infection");
        cmd->add_option("--budget", budget, "Emulation step budget")->check(CLI::PositiveNumber);
        cmd->add_option("--jobs", jobs, "Worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);
    }

    std::string resolve_db(const fs::path& fallback_dir = {}) const {
        if (!db_path.empty()) return db_path;
        if (const char* env = std::getenv("FPGUARD_DB"); env && *env) return env;
        if (!fallback_dir.empty() && fs::exists(fallback_dir / kCorpusDbFile)) return (fallback_dir / kCorpusDbFile).string();
        return {};
    }

    WeightProfile profile() const {
        if (weights_path.empty()) return default_profile();
        return with_file(weights_path, [](const std::string& t) { return load_weights(t); });
    }

    ScanOptions options() const {
        auto t = *parse_tier(tier);
        if (!methods.empty()) return preset_options(*parse_preset(methods), t, budget);
        ScanOptions o;
        o.tier = t;
        o.budget = budget;
        o.policy = CombinationPolicy{k_confirm, !no_exact_sufficient, integrity_alarms};
        return o;
    }

    Engine engine(const fs::path& fallback_dir = {}) const {
        SignatureDb db;
        auto path = resolve_db(fallback_dir);
        if (!path.empty()) db = with_file(path, [](const std::string& t) { return parse_db(t); });
        return Engine(db, profile(), options());
    }
};

json evidence_json(const std::vector<Evidence>& evidence) {
    json arr = json::array();
    for (const auto& e : evidence) {
        arr.push_back({{"category", category_name(e.category)},
                       {"detail", e.detail},
                       {"strength", e.strength == Strength::Confirming ? "confirming" : "suggestive"}});
    }
    return arr;
}

json metrics_json(const Metrics& m, bool timing) {
    json j = {{"tp", m.tp},
              {"fp", m.fp},
              {"tn", m.tn},
              {"fn", m.fn},
              {"suspicious_benign", m.suspicious_benign},
              {"suspicious_malicious", m.suspicious_malicious},
              {"benign", m.benign()},
              {"malicious", m.malicious()},
              {"fp_rate", m.fp_rate()},
              {"fn_rate", m.fn_rate()},
              {"scanned_bytes", m.scanned_bytes}};
    if (timing) {
        j["elapsed_s"] = m.elapsed_s;
        j["throughput"] = m.throughput();
    }
    return j;
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::string metrics_header(bool timing) {
    std::string h = "tp\tfp\ttn\tfn\tsuspicious_benign\tfp_rate\tfn_rate\tscanned_bytes";
    if (timing) h += "\telapsed_s\tthroughput_Bps";
    return h;
}

std::string metrics_row(const Metrics& m, bool timing) {
    std::ostringstream s;
    s << m.tp << '\t' << m.fp << '\t' << m.tn << '\t' << m.fn << '\t' << m.suspicious_benign << '\t' << fixed(m.fp_rate())
      << '\t' << fixed(m.fn_rate()) << '\t' << m.scanned_bytes;
    if (timing) s << '\t' << fixed(m.elapsed_s, 6) << '\t' << fixed(m.throughput(), 0);
    return s.str();
}

// ---------------------------------------------------------------------------

int cmd_scan(const EngineFlags& flags, const std::vector<std::string>& inputs, bool interactive,
             const std::string& answers_path, bool as_json) {
    auto engine = flags.engine();
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    auto results = scan_targets(engine, collect_targets(paths), flags.jobs);

    if (interactive) {
        std::ifstream answers_file;
        if (!answers_path.empty()) {
            answers_file.open(answers_path);
            if (!answers_file) throw IoError(answers_path, "cannot open answers file");
        }
        std::istream& answers = answers_path.empty() ? std::cin : answers_file;
        for (auto& r : results) {
            if (r.verdict.decision != Decision::Suspicious) continue;
            std::cerr << r.target.path.generic_string() << ": suspicious (" << summarize_evidence(r.verdict.evidence)
                      << "). Treat as genuine? [y/N] " << std::flush;
            std::string line;
            std::getline(answers, line);
            auto a = trim(line);
            bool genuine = a == "y" || a == "Y" || a == "yes" || a == "YES";
            if (!answers_path.empty()) std::cerr << (genuine ? "y" : "n") << '\n';
            r.verdict = apply_feedback(r.verdict, genuine);
        }
    }

    int code = kExitClean;
    for (const auto& r : results) {
        if (r.verdict.decision == Decision::Infected) code = kExitInfected;
        else if (r.verdict.decision == Decision::Suspicious && code == kExitClean) code = kExitSuspicious;
    }

    if (as_json) {
        json out = {{"results", json::array()}};
        for (const auto& r : results) {
            out["results"].push_back({{"path", r.target.path.generic_string()},
                                      {"decision", decision_name(r.verdict.decision)},
                                      {"overridden_by_user", r.verdict.overridden_by_user},
                                      {"evidence", evidence_json(r.verdict.evidence)}});
        }
        out["exit_code"] = code;
        std::cout << out.dump(2) << '\n';
    } else {
        for (const auto& r : results) {
            std::cout << r.target.path.generic_string() << '\t' << decision_name(r.verdict.decision) << '\t'
                      << summarize_evidence(r.verdict.evidence) << (r.verdict.overridden_by_user ? " [user]" : "") << '\n';
        }
    }
    return code;
}

int cmd_baseline(const std::string& root, const std::string& out_path, bool as_json) {
    auto store = build_baseline(root);
    SignatureDb db;
    db.baselines = store.to_records();
    if (as_json) {
        json out = {{"root", root}, {"records", json::array()}};
        for (const auto& r : db.baselines) out["records"].push_back({{"path_id", r.path_id}, {"digest", digest_hex(r.digest)}});
        std::cout << out.dump(2) << '\n';
    }
    auto text = serialize_db(db);
    if (!out_path.empty()) write_file(out_path, text);
    else if (!as_json) std::cout << text;
    return kExitClean;
}

int cmd_emulate(const std::string& file, std::uint64_t budget, bool as_json) {
    auto program = with_file(file, [](const std::string& t) { return parse_spx(t); });
    auto trace = execute(program, budget);
    if (!as_json) {
        std::cout << format_trace(trace);
        return kExitClean;
    }
    json events = json::array();
    for (const auto& e : trace.events) {
        json arg = nullptr;
        if (auto s = std::get_if<std::string>(&e.arg)) arg = *s;
        else if (auto n = std::get_if<std::int64_t>(&e.arg)) arg = *n;
        events.push_back({{"step", e.step}, {"kind", behavior_name(e.kind)}, {"arg", arg}});
    }
    json diff = json::array();
    for (auto k : diff_abilities(program, trace)) diff.push_back(behavior_name(k));
    json features = json::array();
    for (auto f : extract_dynamic_features(program, trace)) features.push_back(feature_name(f));
    json out = {{"program", program.name},
                {"steps", trace.steps_executed},
                {"terminated", trace.terminated == Termination::Halted ? "Halted" : "BudgetExhausted"},
                {"events", events},
                {"ability_diff", diff},
                {"dynamic_features", features}};
    std::cout << out.dump(2) << '\n';
    return kExitClean;
}

int cmd_select_sig(const std::string& sample_path, const std::string& benign_dir, std::size_t n, std::size_t stride,
                   std::string name, bool as_json) {
    auto sample = read_file(sample_path);
    std::vector<Bytes> corpus;
    for (const auto& f : list_regular_files(benign_dir)) corpus.push_back(read_file(f));
    auto best = select_signature(score_candidates(extract_candidates(sample, n, stride), corpus));
    if (name.empty()) {
        name = "sel_";
        for (char c : fs::path(sample_path).stem().string()) name.push_back(is_valid_name(std::string(1, c)) ? c : '_');
    }
    if (!is_valid_name(name)) throw Error("invalid signature name '" + name + "'");
    if (as_json) {
        json out = {{"name", name},
                    {"hex", to_hex(best.bytes)},
                    {"offset", best.offset},
                    {"benign_hits", best.benign_hits},
                    {"corpus_size", best.corpus_size},
                    {"score", best.score()},
                    {"line", "EXACT " + name + " " + to_hex(best.bytes)}};
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << "EXACT " << name << ' ' << to_hex(best.bytes) << '\n';
    }
    return kExitClean;
}

int cmd_net(const std::string& stream, std::int64_t window, const WindowParams& params, const std::string& weights_path,
            bool as_json) {
    auto pkts = with_file(stream, [](const std::string& t) { return parse_stream(t); });
    WeightProfile profile = weights_path.empty() ? default_profile()
                                                 : with_file(weights_path, [](const std::string& t) { return load_weights(t); });
    auto windows = score_windows(pkts, window, profile.weights, params);
    if (!as_json) {
        std::cout << format_windows(windows);
        return kExitClean;
    }
    json arr = json::array();
    for (const auto& w : windows) {
        json feats = json::array();
        for (auto f : w.features) feats.push_back(feature_name(f));
        arr.push_back({{"start", w.window_start},
                       {"end", w.window_end()},
                       {"net", w.net},
                       {"features", feats},
                       {"packets", w.counts.packets},
                       {"max_fanout", w.counts.max_fanout},
                       {"max_repeat", w.counts.max_repeat}});
    }
    json out = {{"window_ms", window}, {"packets", pkts.size()}, {"windows", arr}};
    if (auto alarm = first_alarm(windows)) out["first_alarm"] = *alarm;
    else out["first_alarm"] = nullptr;
    std::cout << out.dump(2) << '\n';
    return kExitClean;
}

int cmd_eval(const EngineFlags& flags, const std::string& manifest_path, bool timing, bool as_json) {
    auto manifest = load_manifest(manifest_path);
    auto engine = flags.engine(fs::path(manifest_path).parent_path());
    auto m = evaluate(manifest, engine, flags.jobs);
    if (as_json) {
        json out = metrics_json(m, timing);
        out["methods"] = flags.methods.empty() ? "custom" : flags.methods;
        out["tier"] = flags.tier;
        std::cout << out.dump(2) << '\n';
        return kExitClean;
    }
    std::cout << metrics_header(timing) << '\n' << metrics_row(m, timing) << '\n';
    std::cout << "# " << m.total() << " files (" << m.benign() << " benign, " << m.malicious() << " malicious); FP rate "
              << fixed(m.fp_rate()) << " (" << m.fp << '/' << m.benign() << "), FN rate " << fixed(m.fn_rate()) << " ("
              << m.fn << '/' << m.malicious() << "), suspicious benign " << m.suspicious_benign << '\n';
    return kExitClean;
}

int cmd_sweep(const EngineFlags& flags, const std::string& manifest_path, std::vector<std::int64_t> thresholds,
              bool timing, bool as_json) {
    auto manifest = load_manifest(manifest_path);
    auto engine = flags.engine(fs::path(manifest_path).parent_path());
    auto rows = threshold_sweep(manifest, engine, thresholds, flags.jobs);
    if (as_json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json row = metrics_json(r.metrics, timing);
            row["threshold"] = r.threshold;
            arr.push_back(row);
        }
        std::cout << json{{"tier", flags.tier}, {"rows", arr}}.dump(2) << '\n';
        return kExitClean;
    }
    std::cout << "threshold\t" << metrics_header(timing) << '\n';
    for (const auto& r : rows) std::cout << r.threshold << '\t' << metrics_row(r.metrics, timing) << '\n';
    return kExitClean;
}

int cmd_gen_corpus(std::uint64_t seed, std::size_t benign, std::size_t malicious, const std::string& out, bool as_json) {
    auto m = generate_corpus(seed, benign, malicious, out);
    if (as_json) {
        json out_j = {{"out", out},
                      {"manifest", (fs::path(out) / kManifestFile).generic_string()},
                      {"db", (fs::path(out) / kCorpusDbFile).generic_string()},
                      {"benign", m.count(Label::Benign)},
                      {"malicious", m.count(Label::Malicious)}};
        std::cout << out_j.dump(2) << '\n';
    } else {
        std::cout << "wrote " << m.entries.size() << " files (" << m.count(Label::Benign) << " benign, "
                  << m.count(Label::Malicious) << " malicious) to " << out << '\n';
    }
    return kExitClean;
}

int cmd_db_check(const std::string& path, bool as_json) {
    auto db = with_file(path, [](const std::string& t) { return parse_db(t); });
    if (as_json) {
        json out = {{"path", path},
                    {"version", db.version},
                    {"exact", db.exact.size()},
                    {"generic", db.generic.size()},
                    {"hash", db.baselines.size()}};
        std::cout << out.dump(2) << '\n';
    } else {
        std::cout << path << ": ok, version " << db.version << ", " << db.exact.size() << " exact, " << db.generic.size()
                  << " generic, " << db.baselines.size() << " hash records\n";
    }
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fpguard: signature, integrity, heuristic and network scanning with false-positive throttling"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Emit machine-readable JSON");

    EngineFlags engine_flags;
    int code = kExitClean;

    // scan
    auto* scan = app.add_subcommand("scan", "Scan files or directories");
    std::vector<std::string> scan_inputs;
    bool interactive = false;
    std::string answers;
    engine_flags.add_to(scan);
    scan->add_option("paths", scan_inputs, "Files or directories")->required();
    scan->add_flag("--interactive", interactive, "Ask the operator about each suspicious file");
    scan->add_option("--answers", answers, "Read interactive answers (y/n per line) from a file");
    scan->add_flag("--json", as_json, "Emit JSON");
    scan->callback([&] { code = cmd_scan(engine_flags, scan_inputs, interactive, answers, as_json); });

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Hash every file under a directory into HASH records");
    std::string baseline_root, baseline_out;
    baseline->add_option("root", baseline_root, "Directory")->required();
    baseline->add_option("--out", baseline_out, "Write the .avdb here instead of stdout");
    baseline->add_flag("--json", as_json, "Emit JSON");
    baseline->callback([&] { code = cmd_baseline(baseline_root, baseline_out, as_json); });

    // emulate
    auto* emulate = app.add_subcommand("emulate", "Run an SPX program in the sandbox and print its trace");
    std::string emulate_file;
    std::uint64_t emulate_budget = kDefaultStepBudget;
    emulate->add_option("file", emulate_file, "SPX program")->required();
    emulate->add_option("--budget", emulate_budget, "Step budget")->check(CLI::PositiveNumber);
    emulate->add_flag("--json", as_json, "Emit JSON");
    emulate->callback([&] { code = cmd_emulate(emulate_file, emulate_budget, as_json); });

    // select-sig
    auto* select = app.add_subcommand("select-sig", "Pick the sample n-gram least likely to occur in benign files");
    std::string sample, benign_dir, sig_name;
    std::size_t n = kDefaultCandidateLength, stride = kDefaultCandidateStride;
    select->add_option("--sample", sample, "Malicious sample")->required();
    select->add_option("--benign-dir", benign_dir, "Directory of benign files")->required();
    select->add_option("--n", n, "Candidate length")->check(CLI::Range(std::size_t{4}, std::size_t{4096}));
    select->add_option("--stride", stride, "Candidate stride")->check(CLI::PositiveNumber);
    select->add_option("--name", sig_name, "Signature name for the emitted EXACT line");
    select->add_flag("--json", as_json, "Emit JSON");
    select->callback([&] { code = cmd_select_sig(sample, benign_dir, n, stride, sig_name, as_json); });

    // net
    auto* net = app.add_subcommand("net", "Score a packet stream in tumbling windows");
    std::string stream, net_weights;
    std::int64_t window = 1000;
    WindowParams params;
    net->add_option("--stream", stream, "Packet stream (.pkt)")->required();
    net->add_option("--window", window, "Window length in ms")->check(CLI::PositiveNumber);
    net->add_option("--rate-limit", params.rate_limit, "RATE_SPIKE when packets per window exceed this");
    net->add_option("--fanout-limit", params.fanout_limit, "FANOUT_HIGH when distinct dsts of one src exceed this");
    net->add_option("--repeat-limit", params.repeat_limit, "PAYLOAD_REPEAT when one payload tag repeats more than this");
    net->add_option("--weights", net_weights, "Weights file (.avw)");
    net->add_flag("--json", as_json, "Emit JSON");
    net->callback([&] { code = cmd_net(stream, window, params, net_weights, as_json); });

    // eval
    auto* eval = app.add_subcommand("eval", "Measure FP/FN rates over a labeled corpus");
    std::string manifest;
    bool timing = false;
    engine_flags.add_to(eval);
    eval->add_option("--manifest", manifest, "Corpus manifest (.tsv)")->required();
    eval->add_flag("--timing", timing, "Include elapsed time and throughput");
    eval->add_flag("--json", as_json, "Emit JSON");
    eval->callback([&] { code = cmd_eval(engine_flags, manifest, timing, as_json); });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Evaluate a corpus across ascending thresholds");
    std::vector<std::int64_t> thresholds;
    engine_flags.add_to(sweep);
    sweep->add_option("--manifest", manifest, "Corpus manifest (.tsv)")->required();
    sweep->add_option("--thresholds", thresholds, "Ascending thresholds")->delimiter(',')->required();
    sweep->add_flag("--timing", timing, "Include elapsed time and throughput");
    sweep->add_flag("--json", as_json, "Emit JSON");
    sweep->callback([&] { code = cmd_sweep(engine_flags, manifest, thresholds, timing, as_json); });

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "Write a seeded synthetic corpus, manifest and signature db");
    std::uint64_t seed = 1;
    std::size_t n_benign = 200, n_malicious = 50;
    std::string out_dir;
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--benign", n_benign, "Benign program count");
    gen->add_option("--malicious", n_malicious, "Malicious program count");
    gen->add_option("--out", out_dir, "Output directory")->required();
    gen->add_flag("--json", as_json, "Emit JSON");
    gen->callback([&] { code = cmd_gen_corpus(seed, n_benign, n_malicious, out_dir, as_json); });

    // db-check
    auto* check = app.add_subcommand("db-check", "Validate a signature database");
    std::string db_file;
    check->add_option("file", db_file, "Database (.avdb)")->required();
    check->add_flag("--json", as_json, "Emit JSON");
    check->callback([&] { code = cmd_db_check(db_file, as_json); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    } catch (const std::exception& e) {
        std::cerr << "fpguard: " << e.what() << '\n';
        return kExitError;
    }
    return code;
}
