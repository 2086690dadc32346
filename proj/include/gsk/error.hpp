#pragma once

#include <stdexcept>
#include <string>

namespace gsk {

/// Base exception for all failures raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when operand dimensions do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Raised by file readers; the message carries the offending line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace gsk
