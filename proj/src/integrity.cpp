#include "fpguard/integrity.hpp"

#include <algorithm>
#include <exception>
#include <openssl/sha.h>
#include <system_error>

namespace fpguard {

namespace fs = std::filesystem;

Digest digest_file(ByteView data) {
    Digest d{};
    SHA256(data.data(), data.size(), d.data());
    return d;
}

const char* to_string(IntegrityStatus s) {
    switch (s) {
    case IntegrityStatus::Unmodified: return "Unmodified";
    case IntegrityStatus::Modified: return "Modified";
    case IntegrityStatus::Unknown: return "Unknown";
    }
    return "?";
}

void BaselineStore::add(const std::string& path_id, const Digest& digest) {
    if (!is_valid_path_id(path_id)) throw SyntaxError(0, "invalid path id '" + path_id + "'");
    records_[path_id] = digest;
}

IntegrityStatus BaselineStore::check(const std::string& path_id, ByteView data) const {
    auto it = records_.find(path_id);
    if (it == records_.end()) return IntegrityStatus::Unknown;
    return it->second == digest_file(data) ? IntegrityStatus::Unmodified : IntegrityStatus::Modified;
}

std::vector<IntegrityRecord> BaselineStore::to_records() const {
    std::vector<IntegrityRecord> out;
    out.reserve(records_.size());
    for (const auto& [path, digest] : records_) out.push_back(IntegrityRecord{path, digest});
    return out;
}

BaselineStore BaselineStore::from_records(const std::vector<IntegrityRecord>& records) {
    BaselineStore store;
    for (const auto& r : records) store.add(r.path_id, r.digest);
    return store;
}

std::string make_path_id(const fs::path& root, const fs::path& path) {
    auto rel = path.lexically_normal().lexically_relative(root.lexically_normal());
    if (rel.empty() || rel == ".") rel = path.filename();
    return rel.generic_string();
}

std::vector<fs::path> list_regular_files(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError(root.string(), "not a readable directory");
    std::vector<fs::path> files;
    fs::recursive_directory_iterator it(root, ec), end;
    if (ec) throw IoError(root.string(), ec.message());
    for (; it != end; it.increment(ec)) {
        if (ec) throw IoError(root.string(), ec.message());
        if (it->is_regular_file(ec)) files.push_back(it->path());
    }
    std::sort(files.begin(), files.end(), [&](const fs::path& a, const fs::path& b) {
        return make_path_id(root, a) < make_path_id(root, b);
    });
    return files;
}

BaselineStore build_baseline_serial(const fs::path& root) {
    BaselineStore store;
    for (const auto& file : list_regular_files(root)) store.add_content(make_path_id(root, file), read_file(file));
    return store;
}

BaselineStore build_baseline(const fs::path& root) {
    const auto files = list_regular_files(root);
    std::vector<Digest> digests(files.size());
    std::vector<std::exception_ptr> errors(files.size());

#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            digests[i] = digest_file(read_file(files[i]));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }

    BaselineStore store;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        store.add(make_path_id(root, files[i]), digests[i]);
    }
    return store;
}

}  // namespace fpguard
