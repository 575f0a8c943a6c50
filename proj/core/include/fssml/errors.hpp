#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fssml {

/// Input outside the mathematical domain of an operation (non-positive
/// inductance, non-finite admittance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller misuse: shape mismatches, empty inputs, missing prerequisites.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A series resonator evaluated exactly at its resonance.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

/// ABCD to S conversion with a vanishing denominator.
class SingularNetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Structurally valid file with the wrong version or schema.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fssml
