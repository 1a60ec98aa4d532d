#pragma once

#include <stdexcept>
#include <string>

namespace fairmap {

/// Broad error families; each maps to one CLI exit code.
enum class ErrorKind {
    Validation,  // exit 2
    CapExceeded, // exit 3
    Io,          // exit 4
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what)
        : std::runtime_error(what), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// Short machine-readable name, e.g. "RowSumViolation".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

struct ValidationError : Error {
    ValidationError(std::string code, const std::string& what)
        : Error(ErrorKind::Validation, std::move(code), what) {}
};

struct CapExceededError : Error {
    CapExceededError(std::string code, const std::string& what)
        : Error(ErrorKind::CapExceeded, std::move(code), what) {}
};

struct IoError : Error {
    IoError(std::string code, const std::string& what)
        : Error(ErrorKind::Io, std::move(code), what) {}
};

inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 2;
        case ErrorKind::CapExceeded: return 3;
        case ErrorKind::Io: return 4;
    }
    return 1;
}

} // namespace fairmap
