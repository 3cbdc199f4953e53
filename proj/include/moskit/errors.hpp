#pragma once

#include <stdexcept>
#include <string>

namespace moskit {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data or arguments: malformed files, out-of-range values,
// violated invariants. Maps to CLI exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Filesystem and OS-level failures. Maps to CLI exit code 2.
class IoError : public Error {
public:
    using Error::Error;
};

// External adapter subprocess failed (nonzero exit, timeout, unreadable
// output). Carries the captured stdout/stderr tail. Exit code 2.
class AdapterError : public IoError {
public:
    explicit AdapterError(const std::string& msg, std::string captured = {})
        : IoError(captured.empty() ? msg : msg + "\n--- captured output ---\n" + captured),
          diagnostics(std::move(captured)) {}

    std::string diagnostics;
};

} // namespace moskit
