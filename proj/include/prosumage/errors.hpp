#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prosumage {

/// A caller broke a documented precondition (wrong resolution, mismatched lengths).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what);

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Inputs that parse but make no sense (negative costs, share above 1, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The LP backend could not produce an optimal solution.
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prosumage
