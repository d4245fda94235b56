// Serial reference vs OpenMP kernel for each parallel stage.

#include "fpguard/evalharness.hpp"
#include "fpguard/matcher.hpp"
#include "fpguard/netwindow.hpp"
#include "fpguard/sigselect.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace fpguard;

namespace {

Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

const CompiledMatcher& matcher_with(std::size_t n_sigs) {
    static std::map<std::size_t, CompiledMatcher> cache;
    auto it = cache.find(n_sigs);
    if (it == cache.end()) {
        std::mt19937_64 rng(n_sigs);
        std::vector<ExactSignature> sigs;
        for (std::size_t i = 0; i < n_sigs; ++i) sigs.push_back({"s" + std::to_string(i), random_bytes(rng, 16)});
        it = cache.emplace(n_sigs, CompiledMatcher::compile(sigs, {})).first;
    }
    return it->second;
}

const Bytes& scan_data() {
    static Bytes data = [] {
        std::mt19937_64 rng(42);
        return random_bytes(rng, 32u << 20);
    }();
    return data;
}

void BM_ScanSerial(benchmark::State& state) {
    const auto& m = matcher_with(static_cast<std::size_t>(state.range(0)));
    const auto& data = scan_data();
    for (auto _ : state) benchmark::DoNotOptimize(m.scan(data));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * scan_data().size()));
}
BENCHMARK(BM_ScanSerial)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ScanParallel(benchmark::State& state) {
    const auto& m = matcher_with(static_cast<std::size_t>(state.range(0)));
    const auto& data = scan_data();
    for (auto _ : state) benchmark::DoNotOptimize(m.scan_parallel(data));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * scan_data().size()));
}
BENCHMARK(BM_ScanParallel)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

struct SelectInput {
    std::vector<Candidate> cands;
    std::vector<Bytes> corpus;
};

const SelectInput& select_input() {
    static SelectInput in = [] {
        std::mt19937_64 rng(7);
        SelectInput s;
        s.cands = extract_candidates(random_bytes(rng, 64 << 10), 16, 8);
        for (int i = 0; i < 64; ++i) s.corpus.push_back(random_bytes(rng, 256 << 10));
        return s;
    }();
    return in;
}

void BM_ScoreCandidatesSerial(benchmark::State& state) {
    const auto& in = select_input();
    for (auto _ : state) benchmark::DoNotOptimize(score_candidates_serial(in.cands, in.corpus));
}
BENCHMARK(BM_ScoreCandidatesSerial)->Unit(benchmark::kMillisecond);

void BM_ScoreCandidatesParallel(benchmark::State& state) {
    const auto& in = select_input();
    for (auto _ : state) benchmark::DoNotOptimize(score_candidates(in.cands, in.corpus));
}
BENCHMARK(BM_ScoreCandidatesParallel)->Unit(benchmark::kMillisecond);

const std::vector<PacketRecord>& packets() {
    static std::vector<PacketRecord> p = [] {
        std::mt19937_64 rng(9);
        std::vector<PacketRecord> out;
        std::int64_t t = 0;
        for (int i = 0; i < 500'000; ++i) {
            t += static_cast<std::int64_t>(rng() % 3);
            out.push_back({t, "s" + std::to_string(rng() % 64), "d" + std::to_string(rng() % 512), 100, rng() % 1000});
        }
        return out;
    }();
    return p;
}

void BM_WindowsSerial(benchmark::State& state) {
    const auto& w = default_profile().weights;
    const auto& p = packets();
    for (auto _ : state) benchmark::DoNotOptimize(score_windows_serial(p, state.range(0), w));
}
BENCHMARK(BM_WindowsSerial)->Arg(250)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_WindowsParallel(benchmark::State& state) {
    const auto& w = default_profile().weights;
    const auto& p = packets();
    for (auto _ : state) benchmark::DoNotOptimize(score_windows(p, state.range(0), w));
}
BENCHMARK(BM_WindowsParallel)->Arg(250)->Arg(2000)->Unit(benchmark::kMillisecond);

struct EvalInput {
    std::filesystem::path dir;
    CorpusManifest manifest;
    std::unique_ptr<Engine> engine;
};

const EvalInput& eval_input() {
    static EvalInput in = [] {
        EvalInput e;
        e.dir = std::filesystem::temp_directory_path() / "fpguard_bench_corpus";
        e.manifest = generate_corpus(1, 800, 200, e.dir);
        auto bytes = read_file(e.dir / kCorpusDbFile);
        e.engine = std::make_unique<Engine>(parse_db(std::string(bytes.begin(), bytes.end())), default_profile());
        return e;
    }();
    return in;
}

void BM_EvaluateSerial(benchmark::State& state) {
    const auto& e = eval_input();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(e.manifest, *e.engine));
}
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);

void BM_EvaluateParallel(benchmark::State& state) {
    const auto& e = eval_input();
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(e.manifest, *e.engine));
}
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
