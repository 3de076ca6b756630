#pragma once

#include <stdexcept>
#include <string>

namespace rate {

/// Malformed input data (bad triple line, bad config key, bad checkpoint).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0)
        : std::runtime_error(line > 0 ? message + " (line " + std::to_string(line) + ")"
                                      : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A caller violated a documented precondition.
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& message) : std::logic_error(message) {}
};

/// Negative sampling cannot produce any admissible corruption.
class SamplingError : public std::runtime_error {
public:
    explicit SamplingError(const std::string& message) : std::runtime_error(message) {}
};

/// Training aborted (non-finite loss or similar), with diagnostics attached.
class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& message) : std::runtime_error(message) {}
};

/// Filesystem / stream failure.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace rate
