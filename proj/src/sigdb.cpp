#include "fpguard/sigdb.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

namespace fpguard {

std::size_t GenericSignature::max_span() const {
    std::size_t span = 0;
    for (const auto& t : tokens) span += t.max_width();
    return span;
}

bool is_valid_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
               c == '.' || c == '-';
    });
}

bool is_valid_path_id(std::string_view path_id) {
    if (path_id.empty() || path_id.front() == '/') return false;
    for (char c : path_id) {
        if (c == '\\' || c == ' ' || c == '\t' || c == '#' || static_cast<unsigned char>(c) < 0x20) return false;
    }
    std::size_t start = 0;
    while (start <= path_id.size()) {
        auto end = path_id.find('/', start);
        if (end == std::string_view::npos) end = path_id.size();
        auto part = path_id.substr(start, end - start);
        if (part.empty() || part == "." || part == "..") return false;
        start = end + 1;
    }
    return true;
}

std::optional<std::string> check_pattern(const std::vector<PatternToken>& tokens) {
    if (tokens.empty()) return "empty pattern";
    if (tokens.front().kind == PatternToken::Kind::Gap) return "pattern begins with a gap";
    if (tokens.back().kind == PatternToken::Kind::Gap) return "pattern ends with a gap";
    std::size_t concrete = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        if (t.kind == PatternToken::Kind::Byte) ++concrete;
        if (t.kind != PatternToken::Kind::Gap) continue;
        if (t.gap_min > t.gap_max) return "gap minimum exceeds maximum";
        if (t.gap_max > kMaxGap) return "gap maximum exceeds " + std::to_string(kMaxGap);
        if (i > 0 && tokens[i - 1].kind == PatternToken::Kind::Gap) return "adjacent gaps";
    }
    if (concrete < 2) return "fewer than 2 concrete bytes";
    return std::nullopt;
}

namespace {

std::optional<std::uint32_t> parse_uint(std::string_view s) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

std::optional<PatternToken> parse_token(std::string_view tok) {
    if (tok == "??") return PatternToken::any();
    if (tok == "*") return PatternToken::gap(0, kDefaultStarGap);
    if (tok.size() >= 5 && tok.substr(0, 2) == "*{" && tok.back() == '}') {
        auto body = tok.substr(2, tok.size() - 3);
        auto dash = body.find('-');
        if (dash == std::string_view::npos) return std::nullopt;
        auto lo = parse_uint(body.substr(0, dash));
        auto hi = parse_uint(body.substr(dash + 1));
        if (!lo || !hi) return std::nullopt;
        return PatternToken::gap(*lo, *hi);
    }
    if (tok.size() == 2) {
        auto b = parse_hex(tok);
        if (b) return PatternToken::byte((*b)[0]);
    }
    return std::nullopt;
}

std::string format_token(const PatternToken& tok) {
    switch (tok.kind) {
    case PatternToken::Kind::Byte: {
        std::uint8_t v = tok.value;
        return to_hex(ByteView(&v, 1));
    }
    case PatternToken::Kind::AnyByte:
        return "??";
    case PatternToken::Kind::Gap:
        return "*{" + std::to_string(tok.gap_min) + "-" + std::to_string(tok.gap_max) + "}";
    }
    return {};
}

std::string digest_hex(const Digest& d) { return to_hex(d, false); }

std::optional<Digest> parse_digest(std::string_view hex) {
    if (hex.size() != 64) return std::nullopt;
    if (!std::all_of(hex.begin(), hex.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }))
        return std::nullopt;
    auto bytes = parse_hex(hex);
    Digest d{};
    std::copy(bytes->begin(), bytes->end(), d.begin());
    return d;
}

namespace {

class DbChecker {
public:
    void exact(std::size_t line, const ExactSignature& sig) {
        if (!is_valid_name(sig.name)) throw SyntaxError(line, "invalid signature name '" + sig.name + "'");
        if (sig.bytes.size() < kMinExactLength)
            throw InvalidPattern(line, sig.name, "exact signature shorter than " + std::to_string(kMinExactLength) + " bytes");
        claim_name(line, sig.name);
    }

    void generic(std::size_t line, const GenericSignature& sig) {
        if (!is_valid_name(sig.name)) throw SyntaxError(line, "invalid signature name '" + sig.name + "'");
        if (auto why = check_pattern(sig.tokens)) throw InvalidPattern(line, sig.name, *why);
        claim_name(line, sig.name);
    }

    void baseline(std::size_t line, const IntegrityRecord& rec) {
        if (!is_valid_path_id(rec.path_id)) throw SyntaxError(line, "invalid path id '" + rec.path_id + "'");
        if (!paths_.insert(rec.path_id).second) throw DuplicateName(line, rec.path_id);
    }

private:
    void claim_name(std::size_t line, const std::string& name) {
        if (!names_.insert(name).second) throw DuplicateName(line, name);
    }

    std::set<std::string> names_;
    std::set<std::string> paths_;
};

}  // namespace

SignatureDb parse_db(std::string_view text) {
    SignatureDb db;
    DbChecker checker;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto raw = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto line = trim(raw);
        if (line.empty()) continue;
        auto fields = split_ws(line);

        if (!have_header) {
            if (fields.size() != 2 || fields[0] != "AVDB") throw SyntaxError(line_no, "expected 'AVDB <version>' header");
            auto v = parse_uint(fields[1]);
            if (!v || *v < 1) throw SyntaxError(line_no, "version must be an integer >= 1");
            db.version = *v;
            have_header = true;
            continue;
        }

        auto kind = fields[0];
        if (kind == "EXACT") {
            if (fields.size() != 3) throw SyntaxError(line_no, "EXACT takes <name> <hexbytes>");
            auto bytes = parse_hex(fields[2]);
            if (!bytes) throw SyntaxError(line_no, "malformed hex byte string");
            ExactSignature sig{std::string(fields[1]), std::move(*bytes)};
            checker.exact(line_no, sig);
            db.exact.push_back(std::move(sig));
        } else if (kind == "GENERIC") {
            if (fields.size() < 3) throw SyntaxError(line_no, "GENERIC takes <name> <tok>...");
            GenericSignature sig{std::string(fields[1]), {}};
            for (std::size_t i = 2; i < fields.size(); ++i) {
                auto tok = parse_token(fields[i]);
                if (!tok) throw InvalidPattern(line_no, sig.name, "bad token '" + std::string(fields[i]) + "'");
                sig.tokens.push_back(*tok);
            }
            checker.generic(line_no, sig);
            db.generic.push_back(std::move(sig));
        } else if (kind == "HASH") {
            if (fields.size() != 3) throw SyntaxError(line_no, "HASH takes <path_id> <sha256-hex>");
            auto digest = parse_digest(fields[2]);
            if (!digest) throw SyntaxError(line_no, "digest must be 64 lowercase hex characters");
            IntegrityRecord rec{std::string(fields[1]), *digest};
            checker.baseline(line_no, rec);
            db.baselines.push_back(std::move(rec));
        } else {
            throw SyntaxError(line_no, "unknown record kind '" + std::string(kind) + "'");
        }
    }
    if (!have_header) throw SyntaxError(line_no == 0 ? 1 : line_no, "missing 'AVDB <version>' header");
    return db;
}

void validate_db(const SignatureDb& db) {
    if (db.version < 1) throw SyntaxError(0, "version must be >= 1");
    DbChecker checker;
    for (const auto& s : db.exact) checker.exact(0, s);
    for (const auto& s : db.generic) checker.generic(0, s);
    for (const auto& r : db.baselines) checker.baseline(0, r);
}

SignatureDb canonical(SignatureDb db) {
    auto by_name = [](const auto& a, const auto& b) { return a.name < b.name; };
    std::sort(db.exact.begin(), db.exact.end(), by_name);
    std::sort(db.generic.begin(), db.generic.end(), by_name);
    std::sort(db.baselines.begin(), db.baselines.end(),
              [](const auto& a, const auto& b) { return a.path_id < b.path_id; });
    return db;
}

std::string serialize_db(const SignatureDb& db) {
    auto sorted = canonical(db);
    std::ostringstream out;
    out << "AVDB " << sorted.version << '\n';
    for (const auto& s : sorted.exact) out << "EXACT " << s.name << ' ' << to_hex(s.bytes) << '\n';
    for (const auto& s : sorted.generic) {
        out << "GENERIC " << s.name;
        for (const auto& t : s.tokens) out << ' ' << format_token(t);
        out << '\n';
    }
    for (const auto& r : sorted.baselines) out << "HASH " << r.path_id << ' ' << digest_hex(r.digest) << '\n';
    return out.str();
}

}  // namespace fpguard
