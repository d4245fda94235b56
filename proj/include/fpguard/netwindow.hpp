#pragma once

#include "fpguard/error.hpp"
#include "fpguard/features.hpp"
#include "fpguard/heuristics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

struct PacketRecord {
    std::int64_t t = 0;  // milliseconds, non-decreasing along the stream
    std::string src;
    std::string dst;
    std::uint64_t size = 0;
    std::uint64_t payload_tag = 0;

    bool operator==(const PacketRecord&) const = default;
};

class NonMonotoneTime : public Error {
public:
    explicit NonMonotoneTime(std::size_t line)
        : Error("line " + std::to_string(line) + ": timestamp earlier than the previous packet"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Tab-separated `t src dst size payload_tag` lines; payload_tag is hex with
/// an optional 0x prefix. '#' lines and blank lines are skipped.
std::vector<PacketRecord> parse_stream(std::string_view text);
std::string serialize_stream(const std::vector<PacketRecord>& pkts);

struct WindowParams {
    std::size_t rate_limit = 100;   // RATE_SPIKE when packets > rate_limit
    std::size_t fanout_limit = 10;  // FANOUT_HIGH when one src reaches > fanout_limit distinct dsts
    std::size_t repeat_limit = 10;  // PAYLOAD_REPEAT when one payload_tag occurs > repeat_limit times
};

struct WindowCounts {
    std::size_t packets = 0;
    std::size_t max_fanout = 0;
    std::size_t max_repeat = 0;

    bool operator==(const WindowCounts&) const = default;
};

struct WindowScore {
    std::int64_t window_start = 0;
    std::int64_t window_len = 0;
    WindowCounts counts;
    FeatureSet features;
    std::int64_t net = 0;

    std::int64_t window_end() const { return window_start + window_len; }
    bool operator==(const WindowScore&) const = default;
};

/// Tumbling windows [t0 + kW, t0 + (k+1)W) from the first packet to the
/// last, empty windows included. Windows are scored on OpenMP threads.
std::vector<WindowScore> score_windows(const std::vector<PacketRecord>& pkts, std::int64_t window_ms,
                                       const FeatureWeights& weights, const WindowParams& params = {});

/// Single-threaded reference for score_windows.
std::vector<WindowScore> score_windows_serial(const std::vector<PacketRecord>& pkts, std::int64_t window_ms,
                                              const FeatureWeights& weights, const WindowParams& params = {});

/// Counters for an arbitrary packet range; used for window scoring and for
/// checking that merged windows never count less.
WindowCounts count_window(const PacketRecord* begin, const PacketRecord* end);

/// End timestamp of the first window whose net score reaches min_net.
std::optional<std::int64_t> first_alarm(const std::vector<WindowScore>& windows, std::int64_t min_net = 1);

/// "start<TAB>net<TAB>features" per window ('-' for no features).
std::string format_windows(const std::vector<WindowScore>& windows);

}  // namespace fpguard
