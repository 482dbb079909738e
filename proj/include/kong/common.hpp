#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kong {

/// Dense token id into a label alphabet.
using LabelId = std::uint32_t;

/// A node string: a sequence of label tokens (labels are atomic, never split into characters).
using TokenString = std::vector<LabelId>;

/// Reserved token used for the extra sqrt(c) coordinate of the polynomial kernel.
/// Never assigned to a real label.
inline constexpr LabelId kBiasToken = std::numeric_limits<LabelId>::max();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or parameter combinations (maps to a usage error in the CLI).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Input file problem, located by file and 1-based line number (0 when not line specific).
class ParseError : public DataError {
public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : DataError(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + message),
          file_(std::move(file)),
          line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Raised by the explicit string oracle when total string length exceeds the configured cap.
class StringLengthExceeded : public DataError {
public:
    using DataError::DataError;
};

/// Adds without wrapping; string lengths grow exponentially with depth on cyclic graphs.
inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
    const std::uint64_t sum = a + b;
    return sum < a ? std::numeric_limits<std::uint64_t>::max() : sum;
}

}  // namespace kong
