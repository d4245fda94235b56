#include "fpguard/matcher.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <omp.h>

namespace fpguard {

namespace {
constexpr std::uint32_t kNoState = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kNoHit = std::numeric_limits<std::size_t>::max();
}  // namespace

bool hit_less(const MatchHit& a, const MatchHit& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    if (a.signature_name != b.signature_name) return a.signature_name < b.signature_name;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.length < b.length;
}

CompiledMatcher CompiledMatcher::compile(const SignatureDb& db) { return compile(db.exact, db.generic); }

CompiledMatcher CompiledMatcher::compile(const std::vector<ExactSignature>& exact,
                                         const std::vector<GenericSignature>& generic) {
    CompiledMatcher m;
    m.build_automaton(exact);
    m.build_generic(generic);
    return m;
}

void CompiledMatcher::build_automaton(const std::vector<ExactSignature>& exact) {
    for (const auto& sig : exact) {
        exact_names_.push_back(sig.name);
        exact_len_.push_back(static_cast<std::uint32_t>(sig.bytes.size()));
        max_span_ = std::max(max_span_, sig.bytes.size());
    }
    if (exact.empty()) return;

    // Trie.
    transitions_.assign(256, kNoState);
    std::vector<std::vector<std::uint32_t>> own(1);
    for (std::uint32_t id = 0; id < exact.size(); ++id) {
        const auto& bytes = exact[id].bytes;
        if (bytes.empty()) continue;
        std::uint32_t s = 0;
        for (auto b : bytes) {
            auto& next = transitions_[std::size_t{s} * 256 + b];
            if (next == kNoState) {
                next = static_cast<std::uint32_t>(own.size());
                own.emplace_back();
                transitions_.resize(transitions_.size() + 256, kNoState);
            }
            s = transitions_[std::size_t{s} * 256 + b];
        }
        own[s].push_back(id);
    }

    // Failure links in BFS order; missing edges become DFA edges.
    const std::size_t states = own.size();
    std::vector<std::uint32_t> fail(states, 0);
    std::vector<std::uint32_t> order;
    order.reserve(states);
    std::deque<std::uint32_t> queue;
    for (int b = 0; b < 256; ++b) {
        auto& next = transitions_[b];
        if (next == kNoState) {
            next = 0;
        } else {
            fail[next] = 0;
            queue.push_back(next);
        }
    }
    order.push_back(0);
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        order.push_back(s);
        for (int b = 0; b < 256; ++b) {
            auto& next = transitions_[std::size_t{s} * 256 + b];
            auto via_fail = transitions_[std::size_t{fail[s]} * 256 + b];
            if (next == kNoState) {
                next = via_fail;
            } else {
                fail[next] = via_fail;
                queue.push_back(next);
            }
        }
    }

    // Output sets: own patterns plus everything reachable along failure links.
    std::vector<std::vector<std::uint32_t>> out_old(states);
    for (auto s : order) {
        out_old[s] = own[s];
        if (s != 0) out_old[s].insert(out_old[s].end(), out_old[fail[s]].begin(), out_old[fail[s]].end());
    }

    // Renumber states in BFS order so the shallow states, where a scan of
    // non-matching data spends nearly all its time, share cache lines and pages.
    std::vector<std::uint32_t> renum(states);
    for (std::size_t i = 0; i < states; ++i) renum[order[i]] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> table(transitions_.size());
    std::vector<std::vector<std::uint32_t>> out(states);
    for (std::size_t s = 0; s < states; ++s) {
        const auto ns = std::size_t{renum[s]};
        for (int b = 0; b < 256; ++b) table[ns * 256 + b] = renum[transitions_[s * 256 + b]];
        out[ns] = std::move(out_old[s]);
    }
    transitions_ = std::move(table);
    out_begin_.assign(states + 1, 0);
    for (std::size_t s = 0; s < states; ++s) out_begin_[s + 1] = out_begin_[s] + static_cast<std::uint32_t>(out[s].size());
    out_ids_.reserve(out_begin_.back());
    for (const auto& o : out) out_ids_.insert(out_ids_.end(), o.begin(), o.end());

    for (auto& t : transitions_) {
        if (!out[t].empty()) t |= kOutputFlag;
    }
}

void CompiledMatcher::build_generic(const std::vector<GenericSignature>& generic) {
    using Kind = PatternToken::Kind;
    for (std::uint32_t id = 0; id < generic.size(); ++id) {
        const auto& sig = generic[id];
        GenericEntry entry{sig.name, sig.tokens, 0, 0};
        max_span_ = std::max(max_span_, sig.max_span());

        std::size_t first = sig.tokens.size();
        std::size_t second = sig.tokens.size();
        for (std::size_t i = 0; i < sig.tokens.size(); ++i) {
            if (sig.tokens[i].kind != Kind::Byte) continue;
            if (first == sig.tokens.size()) {
                first = i;
            } else {
                second = i;
                break;
            }
        }
        for (std::size_t i = 0; i < first && i < sig.tokens.size(); ++i) {
            entry.prefix_min += sig.tokens[i].min_width();
            entry.prefix_max += sig.tokens[i].max_width();
        }
        generic_.push_back(std::move(entry));

        // Patterns that bypassed validation (fewer than two concrete bytes)
        // are never indexed and therefore never match.
        if (second == sig.tokens.size()) continue;

        std::uint32_t dmin = 1;
        std::uint32_t dmax = 1;
        for (std::size_t i = first + 1; i < second; ++i) {
            dmin += sig.tokens[i].min_width();
            dmax += sig.tokens[i].max_width();
        }
        auto& groups = anchors_[sig.tokens[first].value];
        auto second_byte = sig.tokens[second].value;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const AnchorGroup& g) {
            return g.second == second_byte && g.dist_min == dmin && g.dist_max == dmax;
        });
        if (it == groups.end()) {
            groups.push_back(AnchorGroup{second_byte, dmin, dmax, {}});
            it = std::prev(groups.end());
        }
        it->sigs.push_back(id);
    }
}

std::optional<std::size_t> match_pattern_at(const std::vector<PatternToken>& tokens, ByteView data,
                                            std::size_t start) {
    if (start > data.size()) return std::nullopt;
    const std::size_t avail = data.size() - start;
    // Sorted, duplicate-free set of offsets (relative to start) reachable
    // after consuming the tokens seen so far.
    std::vector<std::size_t> cur{0};
    std::vector<std::size_t> next;
    for (const auto& tok : tokens) {
        next.clear();
        if (tok.kind == PatternToken::Kind::Gap) {
            std::size_t covered = 0;  // first offset not yet emitted
            for (auto p : cur) {
                std::size_t lo = std::max(p + tok.gap_min, covered);
                std::size_t hi = std::min(p + tok.gap_max, avail);
                for (std::size_t q = lo; q <= hi; ++q) next.push_back(q);
                covered = std::max(covered, hi + 1);
            }
        } else {
            for (auto p : cur) {
                if (p >= avail) break;
                if (tok.kind == PatternToken::Kind::AnyByte || data[start + p] == tok.value) next.push_back(p + 1);
            }
        }
        if (next.empty()) return std::nullopt;
        cur.swap(next);
    }
    return cur.front();
}

void CompiledMatcher::scan_exact(ByteView data, std::size_t report_limit, std::vector<RawHit>& out) const {
    if (transitions_.empty()) return;
    const std::uint32_t* table = transitions_.data();
    const std::uint8_t* bytes = data.data();
    const std::size_t n = data.size();
    std::uint32_t state = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t v = table[(std::size_t{state} << 8) | bytes[i]];
        state = v & ~kOutputFlag;
        if (v & kOutputFlag) [[unlikely]] {
            for (auto k = out_begin_[state]; k < out_begin_[state + 1]; ++k) {
                auto id = out_ids_[k];
                std::size_t start = i + 1 - exact_len_[id];
                if (start < report_limit) out.push_back(RawHit{id, start, exact_len_[id]});
            }
        }
    }
}

bool CompiledMatcher::any_exact(ByteView data) const {
    if (transitions_.empty()) return false;
    const std::uint32_t* table = transitions_.data();
    std::uint32_t state = 0;
    for (auto b : data) {
        std::uint32_t v = table[(std::size_t{state} << 8) | b];
        if (v & kOutputFlag) return true;
        state = v;
    }
    return false;
}

void CompiledMatcher::scan_generic(ByteView data, std::size_t report_limit, std::vector<RawHit>& out) const {
    if (generic_.empty()) return;
    const std::size_t n = data.size();
    std::vector<std::size_t> best_start(generic_.size(), kNoHit);
    std::vector<std::size_t> best_len(generic_.size(), 0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& groups = anchors_[data[i]];
        if (groups.empty()) continue;
        for (const auto& g : groups) {
            bool anchored = false;
            for (std::size_t d = g.dist_min; d <= g.dist_max && i + d < n; ++d) {
                if (data[i + d] == g.second) {
                    anchored = true;
                    break;
                }
            }
            if (!anchored) continue;

            for (auto id : g.sigs) {
                const auto& e = generic_[id];
                if (i < e.prefix_min) continue;
                std::size_t lo = i >= e.prefix_max ? i - e.prefix_max : 0;
                std::size_t hi = i - e.prefix_min;
                std::size_t stop = std::min(best_start[id], report_limit);
                for (std::size_t s = lo; s <= hi && s < stop; ++s) {
                    if (auto len = match_pattern_at(e.tokens, data, s)) {
                        best_start[id] = s;
                        best_len[id] = *len;
                        break;
                    }
                }
            }
        }
    }

    const auto base = static_cast<std::uint32_t>(exact_names_.size());
    for (std::uint32_t id = 0; id < generic_.size(); ++id) {
        if (best_start[id] != kNoHit) out.push_back(RawHit{base + id, best_start[id], best_len[id]});
    }
}

std::vector<MatchHit> CompiledMatcher::finish(std::vector<RawHit>& raw) const {
    std::vector<MatchHit> hits;
    hits.reserve(raw.size());
    const auto nexact = exact_names_.size();
    for (const auto& r : raw) {
        if (r.sig < nexact) {
            hits.push_back(MatchHit{exact_names_[r.sig], HitKind::Exact, r.offset, r.length});
        } else {
            hits.push_back(MatchHit{generic_[r.sig - nexact].name, HitKind::Generic, r.offset, r.length});
        }
    }
    std::sort(hits.begin(), hits.end(), hit_less);
    return hits;
}

std::vector<MatchHit> CompiledMatcher::scan(ByteView data) const {
    std::vector<RawHit> raw;
    scan_exact(data, data.size(), raw);
    scan_generic(data, data.size(), raw);
    return finish(raw);
}

std::vector<MatchHit> CompiledMatcher::scan_parallel(ByteView data, std::size_t chunk_size) const {
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t n = data.size();
    if (n <= chunk_size) return scan(data);

    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    std::vector<std::vector<RawHit>> exact_parts(chunks);
    std::vector<std::vector<RawHit>> generic_parts(chunks);

#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < chunks; ++k) {
        const std::size_t begin = k * chunk_size;
        const std::size_t end = std::min(n, begin + chunk_size + max_span_);
        const std::size_t limit = std::min(chunk_size, n - begin);
        auto sub = data.subspan(begin, end - begin);
        scan_exact(sub, limit, exact_parts[k]);
        scan_generic(sub, limit, generic_parts[k]);
        for (auto& h : exact_parts[k]) h.offset += begin;
        for (auto& h : generic_parts[k]) h.offset += begin;
    }

    std::vector<RawHit> raw;
    std::vector<bool> seen(generic_.size(), false);
    const auto nexact = exact_names_.size();
    for (std::size_t k = 0; k < chunks; ++k) {
        raw.insert(raw.end(), exact_parts[k].begin(), exact_parts[k].end());
        for (const auto& h : generic_parts[k]) {
            if (!seen[h.sig - nexact]) {
                seen[h.sig - nexact] = true;
                raw.push_back(h);
            }
        }
    }
    return finish(raw);
}

std::vector<MatchHit> CompiledMatcher::scan_stream(std::istream& in, std::size_t chunk_size) const {
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t overlap = std::max<std::size_t>(max_span_, 1);
    const auto nexact = exact_names_.size();

    Bytes buf;
    std::size_t base = 0;
    std::vector<RawHit> raw;
    std::vector<bool> seen(generic_.size(), false);
    std::vector<RawHit> part;

    for (;;) {
        const std::size_t old = buf.size();
        buf.resize(old + chunk_size);
        in.read(reinterpret_cast<char*>(buf.data() + old), static_cast<std::streamsize>(chunk_size));
        buf.resize(old + static_cast<std::size_t>(in.gcount()));
        const bool eof = !in;
        if (!eof && buf.size() <= overlap) continue;

        const std::size_t limit = eof ? buf.size() : buf.size() - overlap;
        part.clear();
        scan_exact(buf, limit, part);
        scan_generic(buf, limit, part);
        for (auto h : part) {
            h.offset += base;
            if (h.sig >= nexact) {
                if (seen[h.sig - nexact]) continue;
                seen[h.sig - nexact] = true;
            }
            raw.push_back(h);
        }
        if (eof) break;
        buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(limit));
        base += limit;
    }
    return finish(raw);
}

}  // namespace fpguard
