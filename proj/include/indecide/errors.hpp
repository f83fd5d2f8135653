#pragma once

#include <stdexcept>
#include <string>

namespace indecide {

/// Root of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The requested target value is not enclosed by the search bracket.
class BracketError : public Error {
public:
    using Error::Error;
};

class IterationLimitError : public Error {
public:
    using Error::Error;
};

/// A constraint cannot be met by any admissible rule.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Malformed input document (CSV, rule file, config). Carries the offending line when known.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t line = 0)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace indecide
