#pragma once

#include "fpguard/bytes.hpp"
#include "fpguard/error.hpp"
#include "fpguard/sigdb.hpp"

#include <cstdint>
#include <vector>

namespace fpguard {

/// A fixed-length n-gram cut from a malicious sample, with how many benign
/// corpus files contain it.
struct Candidate {
    Bytes bytes;
    std::size_t offset = 0;
    std::size_t benign_hits = 0;
    std::size_t corpus_size = 0;

    /// benign_hits / corpus_size, or 0 before scoring.
    double score() const { return corpus_size == 0 ? 0.0 : static_cast<double>(benign_hits) / static_cast<double>(corpus_size); }

    bool operator==(const Candidate&) const = default;
};

class SampleTooShort : public Error {
public:
    SampleTooShort(std::size_t len, std::size_t n)
        : Error("sample of " + std::to_string(len) + " bytes is shorter than candidate length " + std::to_string(n)) {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("benign corpus is empty") {}
};

class NoCandidates : public Error {
public:
    NoCandidates() : Error("no candidates to select from") {}
};

inline constexpr std::size_t kDefaultCandidateLength = 16;
inline constexpr std::size_t kDefaultCandidateStride = 8;

/// n-grams at offsets 0, stride, 2*stride, ... ; repeated content keeps only
/// its first offset. Throws SampleTooShort, or Error for n < 4 / stride 0.
std::vector<Candidate> extract_candidates(ByteView sample, std::size_t n = kDefaultCandidateLength,
                                          std::size_t stride = kDefaultCandidateStride);

/// Counts, per candidate, the corpus files containing it. The candidates are
/// compiled into one automaton and corpus files are scanned on OpenMP
/// threads.
std::vector<Candidate> score_candidates(std::vector<Candidate> cands, const std::vector<Bytes>& benign_corpus);

/// Single-threaded reference for score_candidates.
std::vector<Candidate> score_candidates_serial(std::vector<Candidate> cands, const std::vector<Bytes>& benign_corpus);

/// Minimum score; ties go to the smaller offset, then the smaller bytes.
Candidate select_signature(const std::vector<Candidate>& scored);

ExactSignature to_exact_signature(const Candidate& c, std::string name);

}  // namespace fpguard
