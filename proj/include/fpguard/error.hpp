#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpguard {

/// Base of every error the engine raises. Callers that only need a
/// diagnostic can catch this and print what().
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed line in one of the text formats (.avdb, .spx, .avw, .pkt).
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_;
    std::string reason_;
};

class IoError : public Error {
public:
    IoError(const std::string& path, const std::string& reason)
        : Error(path + ": " + reason), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace fpguard
