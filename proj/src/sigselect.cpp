#include "fpguard/sigselect.hpp"

#include "fpguard/matcher.hpp"

#include <algorithm>
#include <set>

namespace fpguard {

std::vector<Candidate> extract_candidates(ByteView sample, std::size_t n, std::size_t stride) {
    if (n < kMinExactLength) throw Error("candidate length must be >= " + std::to_string(kMinExactLength));
    if (stride == 0) throw Error("stride must be >= 1");
    if (sample.size() < n) throw SampleTooShort(sample.size(), n);

    std::vector<Candidate> out;
    std::set<Bytes> seen;
    for (std::size_t off = 0; off + n <= sample.size(); off += stride) {
        Bytes gram(sample.begin() + static_cast<std::ptrdiff_t>(off), sample.begin() + static_cast<std::ptrdiff_t>(off + n));
        if (!seen.insert(gram).second) continue;
        out.push_back(Candidate{std::move(gram), off, 0, 0});
    }
    return out;
}

namespace {

CompiledMatcher compile_candidates(const std::vector<Candidate>& cands) {
    std::vector<ExactSignature> sigs;
    sigs.reserve(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) sigs.push_back(ExactSignature{std::to_string(i), cands[i].bytes});
    return CompiledMatcher::compile(sigs, {});
}

// Indices of candidates occurring in data.
std::vector<std::size_t> present(const CompiledMatcher& m, ByteView data) {
    std::vector<std::size_t> ids;
    for (const auto& h : m.scan(data)) ids.push_back(std::stoul(h.signature_name));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

std::vector<Candidate> score_candidates_serial(std::vector<Candidate> cands, const std::vector<Bytes>& benign_corpus) {
    if (benign_corpus.empty()) throw EmptyCorpus();
    auto m = compile_candidates(cands);
    for (auto& c : cands) {
        c.benign_hits = 0;
        c.corpus_size = benign_corpus.size();
    }
    for (const auto& file : benign_corpus) {
        for (auto id : present(m, file)) ++cands[id].benign_hits;
    }
    return cands;
}

std::vector<Candidate> score_candidates(std::vector<Candidate> cands, const std::vector<Bytes>& benign_corpus) {
    if (benign_corpus.empty()) throw EmptyCorpus();
    auto m = compile_candidates(cands);
    const std::size_t nc = cands.size();
    std::vector<std::size_t> hits(nc, 0);

#pragma omp parallel
    {
        std::vector<std::size_t> local(nc, 0);
#pragma omp for schedule(dynamic) nowait
        for (std::size_t f = 0; f < benign_corpus.size(); ++f) {
            for (auto id : present(m, benign_corpus[f])) ++local[id];
        }
#pragma omp critical
        for (std::size_t i = 0; i < nc; ++i) hits[i] += local[i];
    }

    for (std::size_t i = 0; i < nc; ++i) {
        cands[i].benign_hits = hits[i];
        cands[i].corpus_size = benign_corpus.size();
    }
    return cands;
}

Candidate select_signature(const std::vector<Candidate>& scored) {
    if (scored.empty()) throw NoCandidates();
    // Compare benign_hits / corpus_size exactly by cross-multiplication.
    auto better = [](const Candidate& a, const Candidate& b) {
        auto lhs = a.benign_hits * std::max<std::size_t>(b.corpus_size, 1);
        auto rhs = b.benign_hits * std::max<std::size_t>(a.corpus_size, 1);
        if (lhs != rhs) return lhs < rhs;
        if (a.offset != b.offset) return a.offset < b.offset;
        return a.bytes < b.bytes;
    };
    return *std::min_element(scored.begin(), scored.end(), better);
}

ExactSignature to_exact_signature(const Candidate& c, std::string name) { return ExactSignature{std::move(name), c.bytes}; }

}  // namespace fpguard
