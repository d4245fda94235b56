#include "fpguard/netwindow.hpp"

#include "fpguard/bytes.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fpguard {

namespace {

template <typename T>
std::optional<T> parse_num(std::string_view s, int base = 10) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

std::vector<PacketRecord> parse_stream(std::string_view text) {
    std::vector<PacketRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = trim(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        auto f = split_ws(line);
        if (f.size() != 5) throw SyntaxError(line_no, "expected 5 fields: t src dst size payload_tag");
        auto t = parse_num<std::int64_t>(f[0]);
        if (!t) throw SyntaxError(line_no, "bad timestamp");
        auto size = parse_num<std::uint64_t>(f[3]);
        if (!size) throw SyntaxError(line_no, "bad size");
        auto tag_text = f[4];
        if (tag_text.starts_with("0x") || tag_text.starts_with("0X")) tag_text.remove_prefix(2);
        auto tag = tag_text.size() <= 16 ? parse_num<std::uint64_t>(tag_text, 16) : std::nullopt;
        if (!tag) throw SyntaxError(line_no, "bad payload tag");
        if (!out.empty() && *t < out.back().t) throw NonMonotoneTime(line_no);
        out.push_back(PacketRecord{*t, std::string(f[1]), std::string(f[2]), *size, *tag});
    }
    return out;
}

std::string serialize_stream(const std::vector<PacketRecord>& pkts) {
    std::ostringstream out;
    char tag[19];
    for (const auto& p : pkts) {
        std::snprintf(tag, sizeof tag, "0x%016llx", static_cast<unsigned long long>(p.payload_tag));
        out << p.t << '\t' << p.src << '\t' << p.dst << '\t' << p.size << '\t' << tag << '\n';
    }
    return out.str();
}

WindowCounts count_window(const PacketRecord* begin, const PacketRecord* end) {
    WindowCounts c;
    std::unordered_map<std::string_view, std::set<std::string_view>> fanout;
    std::unordered_map<std::uint64_t, std::size_t> repeats;
    for (auto p = begin; p != end; ++p) {
        ++c.packets;
        auto& dsts = fanout[p->src];
        dsts.insert(p->dst);
        c.max_fanout = std::max(c.max_fanout, dsts.size());
        c.max_repeat = std::max(c.max_repeat, ++repeats[p->payload_tag]);
    }
    return c;
}

namespace {

struct Partition {
    std::int64_t t0 = 0;
    std::vector<std::size_t> bounds;  // window k holds packets [bounds[k], bounds[k+1])
};

Partition partition(const std::vector<PacketRecord>& pkts, std::int64_t w) {
    Partition part;
    if (pkts.empty()) return part;
    part.t0 = pkts.front().t;
    const auto windows = static_cast<std::size_t>((pkts.back().t - part.t0) / w) + 1;
    part.bounds.assign(windows + 1, pkts.size());
    part.bounds[0] = 0;
    std::size_t i = 0;
    for (std::size_t k = 1; k <= windows; ++k) {
        const auto end_t = part.t0 + static_cast<std::int64_t>(k) * w;
        while (i < pkts.size() && pkts[i].t < end_t) ++i;
        part.bounds[k] = i;
    }
    return part;
}

WindowScore score_one(const std::vector<PacketRecord>& pkts, const Partition& part, std::size_t k, std::int64_t w,
                      const FeatureWeights& weights, const WindowParams& params) {
    WindowScore ws;
    ws.window_start = part.t0 + static_cast<std::int64_t>(k) * w;
    ws.window_len = w;
    ws.counts = count_window(pkts.data() + part.bounds[k], pkts.data() + part.bounds[k + 1]);
    if (ws.counts.packets > params.rate_limit) ws.features.insert(Feature::RateSpike);
    if (ws.counts.max_fanout > params.fanout_limit) ws.features.insert(Feature::FanoutHigh);
    if (ws.counts.max_repeat > params.repeat_limit) ws.features.insert(Feature::PayloadRepeat);
    ws.net = score(ws.features, weights).net;
    return ws;
}

void check_window(std::int64_t w) {
    if (w < 1) throw Error("window length must be >= 1 ms");
}

}  // namespace

std::vector<WindowScore> score_windows_serial(const std::vector<PacketRecord>& pkts, std::int64_t window_ms,
                                              const FeatureWeights& weights, const WindowParams& params) {
    check_window(window_ms);
    auto part = partition(pkts, window_ms);
    std::vector<WindowScore> out;
    if (part.bounds.empty()) return out;
    for (std::size_t k = 0; k + 1 < part.bounds.size(); ++k) out.push_back(score_one(pkts, part, k, window_ms, weights, params));
    return out;
}

std::vector<WindowScore> score_windows(const std::vector<PacketRecord>& pkts, std::int64_t window_ms,
                                       const FeatureWeights& weights, const WindowParams& params) {
    check_window(window_ms);
    auto part = partition(pkts, window_ms);
    if (part.bounds.empty()) return {};
    const std::size_t windows = part.bounds.size() - 1;
    std::vector<WindowScore> out(windows);

#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t k = 0; k < windows; ++k) out[k] = score_one(pkts, part, k, window_ms, weights, params);
    return out;
}

std::optional<std::int64_t> first_alarm(const std::vector<WindowScore>& windows, std::int64_t min_net) {
    for (const auto& w : windows) {
        if (w.net >= min_net && !w.features.empty()) return w.window_end();
    }
    return std::nullopt;
}

std::string format_windows(const std::vector<WindowScore>& windows) {
    std::ostringstream out;
    for (const auto& w : windows) {
        auto names = join_features(w.features);
        out << w.window_start << '\t' << w.net << '\t' << (names.empty() ? "-" : names) << '\n';
    }
    return out.str();
}

}  // namespace fpguard
