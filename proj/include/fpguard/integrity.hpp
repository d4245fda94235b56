#pragma once

#include "fpguard/bytes.hpp"
#include "fpguard/sigdb.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fpguard {

/// SHA-256 of data.
Digest digest_file(ByteView data);

enum class IntegrityStatus { Unmodified, Modified, Unknown };

const char* to_string(IntegrityStatus s);

/// path_id -> digest of the known-clean content. path_ids are relative,
/// '/'-separated and free of '.' / '..' components.
class BaselineStore {
public:
    BaselineStore() = default;

    /// Throws SyntaxError on an invalid path_id.
    void add(const std::string& path_id, const Digest& digest);
    void add_content(const std::string& path_id, ByteView data) { add(path_id, digest_file(data)); }

    IntegrityStatus check(const std::string& path_id, ByteView data) const;

    const std::map<std::string, Digest>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    std::vector<IntegrityRecord> to_records() const;
    static BaselineStore from_records(const std::vector<IntegrityRecord>& records);

    bool operator==(const BaselineStore&) const = default;

private:
    std::map<std::string, Digest> records_;
};

inline IntegrityStatus check(const BaselineStore& store, const std::string& path_id, ByteView data) {
    return store.check(path_id, data);
}

/// Normalized path_id of path relative to root.
std::string make_path_id(const std::filesystem::path& root, const std::filesystem::path& path);

/// Regular files below root, sorted by path_id.
std::vector<std::filesystem::path> list_regular_files(const std::filesystem::path& root);

/// Hashes every regular file under root. Files are hashed on OpenMP threads
/// and merged in sorted path order.
BaselineStore build_baseline(const std::filesystem::path& root);

/// Single-threaded reference for build_baseline.
BaselineStore build_baseline_serial(const std::filesystem::path& root);

}  // namespace fpguard
