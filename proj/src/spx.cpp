#include "fpguard/spx.hpp"

#include <array>
#include <charconv>
#include <set>
#include <sstream>

namespace fpguard {

namespace {

constexpr std::array<std::string_view, kBehaviorKindCount> kBehaviorNames = {
    "Open", "Read", "Write", "Close", "Format", "MoveSys", "SelfCopy", "NetSend", "Decrypt",
};

constexpr std::array<std::string_view, 13> kOpcodeNames = {
    "OPEN", "READ", "WRITE", "CLOSE", "FORMAT", "MOVESYS", "COPYSELF", "NETSEND", "DECRYPT", "SET", "JMP", "LABEL", "NOP",
};

struct Token {
    std::string text;
    bool quoted = false;
};

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Splits one line into bare words and quoted literals, stopping at a ';'
// outside quotes.
std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == ';') break;
        if (c == '"') {
            Token tok{{}, true};
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char d = line[i++];
                if (d == '"') {
                    closed = true;
                    break;
                }
                if (d != '\\') {
                    tok.text.push_back(d);
                    continue;
                }
                if (i >= line.size()) break;
                char e = line[i++];
                switch (e) {
                case '"': tok.text.push_back('"'); break;
                case '\\': tok.text.push_back('\\'); break;
                case 'n': tok.text.push_back('\n'); break;
                case 't': tok.text.push_back('\t'); break;
                case 'x': {
                    if (i + 1 >= line.size() || hex_digit(line[i]) < 0 || hex_digit(line[i + 1]) < 0)
                        throw SyntaxError(line_no, "bad \\x escape");
                    tok.text.push_back(static_cast<char>(hex_digit(line[i]) << 4 | hex_digit(line[i + 1])));
                    i += 2;
                    break;
                }
                default: throw SyntaxError(line_no, std::string("unknown escape \\") + e);
                }
            }
            if (!closed) throw SyntaxError(line_no, "unterminated string literal");
            out.push_back(std::move(tok));
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != ';' && line[i] != '"') ++i;
        out.push_back(Token{std::string(line.substr(start, i - start)), false});
    }
    return out;
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::string quote(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "\"";
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else if (u < 0x20 || u >= 0x7F) {
            out += "\\x";
            out.push_back(kHex[u >> 4]);
            out.push_back(kHex[u & 0xF]);
        } else {
            out.push_back(c);
        }
    }
    out += '"';
    return out;
}

std::optional<Opcode> find_opcode(std::string_view s) {
    for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
        if (kOpcodeNames[i] == s) return static_cast<Opcode>(i);
    }
    return std::nullopt;
}

}  // namespace

std::string_view behavior_name(BehaviorKind k) { return kBehaviorNames[static_cast<std::size_t>(k)]; }

std::optional<BehaviorKind> find_behavior(std::string_view name) {
    for (std::size_t i = 0; i < kBehaviorNames.size(); ++i) {
        if (kBehaviorNames[i] == name) return static_cast<BehaviorKind>(i);
    }
    return std::nullopt;
}

std::string_view opcode_name(Opcode op) { return kOpcodeNames[static_cast<std::size_t>(op)]; }

std::optional<BehaviorKind> behavior_of(Opcode op) {
    switch (op) {
    case Opcode::Open: return BehaviorKind::Open;
    case Opcode::Read: return BehaviorKind::Read;
    case Opcode::Write: return BehaviorKind::Write;
    case Opcode::Close: return BehaviorKind::Close;
    case Opcode::Format: return BehaviorKind::Format;
    case Opcode::MoveSys: return BehaviorKind::MoveSys;
    case Opcode::CopySelf: return BehaviorKind::SelfCopy;
    case Opcode::NetSend: return BehaviorKind::NetSend;
    case Opcode::Decrypt: return BehaviorKind::Decrypt;
    case Opcode::Set:
    case Opcode::Jmp:
    case Opcode::Label:
    case Opcode::Nop: return std::nullopt;
    }
    return std::nullopt;
}

Program parse_spx(std::string_view text) {
    Program p;
    std::set<std::string> labels;
    std::vector<std::string> jump_targets;
    bool named = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        auto toks = tokenize(line, line_no);
        if (toks.empty()) continue;
        const auto& head = toks[0];
        if (head.quoted) throw SyntaxError(line_no, "line starts with a string literal");

        auto args = toks.size() - 1;
        auto bare = [&](std::size_t i) {
            if (toks[i].quoted) throw SyntaxError(line_no, "unexpected string literal");
            return std::string_view(toks[i].text);
        };

        if (head.text == ".name") {
            if (args != 1 || !is_identifier(bare(1))) throw SyntaxError(line_no, ".name takes one identifier");
            if (named) throw SyntaxError(line_no, "duplicate .name");
            p.name = toks[1].text;
            named = true;
        } else if (head.text == ".abilities") {
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto kind = find_behavior(bare(i));
                if (!kind) throw SyntaxError(line_no, "unknown ability '" + toks[i].text + "'");
                p.abilities.declared.insert(*kind);
            }
        } else if (head.text == ".str") {
            if (args != 1 || !toks[1].quoted) throw SyntaxError(line_no, ".str takes one quoted literal");
            p.strings.push_back(toks[1].text);
        } else if (!head.text.empty() && head.text[0] == '.') {
            throw SyntaxError(line_no, "unknown directive '" + head.text + "'");
        } else {
            auto op = find_opcode(head.text);
            if (!op) throw UnknownOpcode(line_no, head.text);
            Instruction ins{*op, {}, 0};
            switch (*op) {
            case Opcode::Open:
            case Opcode::MoveSys:
                if (args > 1) throw SyntaxError(line_no, std::string(opcode_name(*op)) + " takes at most one path");
                if (args == 1) ins.text = toks[1].text;
                break;
            case Opcode::NetSend: {
                auto n = args == 1 ? parse_int(bare(1)) : std::nullopt;
                if (!n || *n < 0) throw SyntaxError(line_no, "NETSEND takes a non-negative count");
                ins.number = *n;
                break;
            }
            case Opcode::Set: {
                if (args != 2 || !is_identifier(bare(1))) throw SyntaxError(line_no, "SET takes <reg> <value>");
                auto v = parse_int(bare(2));
                if (!v) throw SyntaxError(line_no, "SET value must be an integer");
                ins.text = toks[1].text;
                ins.number = *v;
                break;
            }
            case Opcode::Jmp:
            case Opcode::Label:
                if (args != 1 || !is_identifier(bare(1)))
                    throw SyntaxError(line_no, std::string(opcode_name(*op)) + " takes one label name");
                ins.text = toks[1].text;
                if (*op == Opcode::Label && !labels.insert(ins.text).second)
                    throw SyntaxError(line_no, "duplicate label '" + ins.text + "'");
                if (*op == Opcode::Jmp) jump_targets.push_back(ins.text);
                break;
            default:
                if (args != 0) throw SyntaxError(line_no, std::string(opcode_name(*op)) + " takes no operands");
                break;
            }
            if (p.code.size() == kMaxInstructions) throw TooLong();
            p.code.push_back(std::move(ins));
        }
    }

    for (const auto& target : jump_targets) {
        if (!labels.contains(target)) throw UndefinedLabel(target);
    }
    return p;
}

std::string to_spx(const Program& p) {
    std::ostringstream out;
    if (!p.name.empty()) out << ".name " << p.name << '\n';
    if (!p.abilities.declared.empty()) {
        out << ".abilities";
        for (auto k : p.abilities.declared) out << ' ' << behavior_name(k);
        out << '\n';
    }
    for (const auto& s : p.strings) out << ".str " << quote(s) << '\n';
    for (const auto& ins : p.code) {
        out << opcode_name(ins.op);
        switch (ins.op) {
        case Opcode::Open:
        case Opcode::MoveSys: out << ' ' << quote(ins.text); break;
        case Opcode::NetSend: out << ' ' << ins.number; break;
        case Opcode::Set: out << ' ' << ins.text << ' ' << ins.number; break;
        case Opcode::Jmp:
        case Opcode::Label: out << ' ' << ins.text; break;
        default: break;
        }
        out << '\n';
    }
    return out.str();
}

FeatureSet extract_static_features(const Program& p) {
    FeatureSet f;

    // OPEN ... READ ... WRITE in code order.
    int stage = 0;
    for (const auto& ins : p.code) {
        if (stage == 0 && ins.op == Opcode::Open) stage = 1;
        else if (stage == 1 && ins.op == Opcode::Read) stage = 2;
        else if (stage == 2 && ins.op == Opcode::Write) {
            stage = 3;
            break;
        }
    }
    if (stage == 3) f.insert(Feature::OpenReadWriteSeq);

    for (const auto& s : p.strings) {
        if (s.find("VIRUS") != std::string::npos) {
            f.insert(Feature::StrVirus);
            break;
        }
    }

    BehaviorSet used;
    for (const auto& ins : p.code) {
        if (auto k = behavior_of(ins.op)) used.insert(*k);
    }
    if (used.contains(BehaviorKind::SelfCopy)) f.insert(Feature::HasCopySelf);
    if (used.contains(BehaviorKind::Format)) f.insert(Feature::HasFormat);
    if (used.contains(BehaviorKind::MoveSys)) f.insert(Feature::HasMoveSys);
    if (used.contains(BehaviorKind::Decrypt)) f.insert(Feature::HasDecrypt);

    const auto& declared = p.abilities.declared;
    if (!declared.empty()) {
        if (!(used - declared).empty()) f.insert(Feature::UndeclaredOpcode);
        else f.insert(Feature::DeclaredAll);
    }
    return f;
}

}  // namespace fpguard
