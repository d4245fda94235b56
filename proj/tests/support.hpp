#pragma once

#include "fpguard/bytes.hpp"
#include "fpguard/sigdb.hpp"
#include "fpguard/spx.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace testing_support {

/// Directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("fpguard_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

inline fpguard::Bytes random_bytes(std::mt19937_64& rng, std::size_t n, unsigned alphabet = 256) {
    fpguard::Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() % alphabet);
    return out;
}

inline std::string random_name(std::mt19937_64& rng, std::size_t index) {
    static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-";
    std::string s;
    for (std::size_t i = 0, n = 1 + rng() % 10; i < n; ++i) s.push_back(kChars[rng() % (sizeof kChars - 1)]);
    return s + "_" + std::to_string(index);
}

/// Random valid generic pattern over a small alphabet so matches happen.
inline std::vector<fpguard::PatternToken> random_pattern(std::mt19937_64& rng, unsigned alphabet) {
    using fpguard::PatternToken;
    std::vector<PatternToken> toks;
    toks.push_back(PatternToken::byte(static_cast<std::uint8_t>(rng() % alphabet)));
    std::size_t middle = rng() % 5;
    for (std::size_t i = 0; i < middle; ++i) {
        switch (rng() % 3) {
        case 0:
            toks.push_back(PatternToken::byte(static_cast<std::uint8_t>(rng() % alphabet)));
            break;
        case 1:
            toks.push_back(PatternToken::any());
            break;
        default:
            if (toks.back().kind != PatternToken::Kind::Gap) {
                auto lo = static_cast<std::uint32_t>(rng() % 4);
                toks.push_back(PatternToken::gap(lo, lo + static_cast<std::uint32_t>(rng() % 6)));
            }
        }
    }
    toks.push_back(PatternToken::byte(static_cast<std::uint8_t>(rng() % alphabet)));
    return toks;
}

/// Random well-formed SPX program that always halts (no JMP).
inline fpguard::Program random_program(std::mt19937_64& rng, std::size_t index) {
    using fpguard::Opcode;
    fpguard::Program p;
    p.name = "p" + std::to_string(index);
    for (std::size_t k = 0; k < fpguard::kBehaviorKindCount; ++k) {
        if (rng() % 2) p.abilities.declared.insert(static_cast<fpguard::BehaviorKind>(k));
    }
    if (rng() % 3 == 0) p.strings.push_back(rng() % 2 ? "VIRUS here" : "say \"hi\"\tnow\\");
    for (std::size_t i = 0, n = rng() % 20; i < n; ++i) {
        fpguard::Instruction ins;
        ins.op = static_cast<Opcode>(rng() % 13);
        switch (ins.op) {
        case Opcode::Open:
        case Opcode::MoveSys:
            if (rng() % 2) ins.text = "C:/dir " + std::to_string(rng() % 100) + ".dat";
            break;
        case Opcode::NetSend:
            ins.number = static_cast<std::int64_t>(rng() % 50);
            break;
        case Opcode::Set:
            ins.text = "r" + std::to_string(rng() % 4);
            ins.number = static_cast<std::int64_t>(rng() % 2000) - 1000;
            break;
        case Opcode::Jmp:
            ins.op = Opcode::Nop;
            break;
        case Opcode::Label:
            ins.text = "l" + std::to_string(i);
            break;
        default:
            break;
        }
        p.code.push_back(ins);
    }
    return p;
}

}  // namespace testing_support
