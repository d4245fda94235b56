#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpguard {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
    auto v = as_bytes(s);
    return {v.begin(), v.end()};
}

/// Uppercase hex, no separators.
std::string to_hex(ByteView data, bool upper = true);

/// Parses contiguous hex (either case). Returns nullopt on odd length or a
/// non-hex digit.
std::optional<Bytes> parse_hex(std::string_view text);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteView data);
void write_file(const std::filesystem::path& path, std::string_view text);

/// Splits on single ASCII spaces/tabs, dropping empty fields.
std::vector<std::string_view> split_ws(std::string_view line);

/// Trims ASCII whitespace (including a trailing CR) from both ends.
std::string_view trim(std::string_view s);

}  // namespace fpguard
