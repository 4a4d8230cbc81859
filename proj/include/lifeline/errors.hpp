#pragma once

#include <stdexcept>
#include <string>

namespace lifeline {

// Bad argument values: indices out of range, nonpositive rates, points
// outside a function's domain.  Maps to CLI exit code 1.
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A structural promise was broken: an input family violates its invariants,
// two quantities that must agree do not, a required field is missing.
// Maps to CLI exit code 1.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative numerical routine failed to reach its target accuracy.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A property check evaluated to "fail" where the caller demanded "pass".
// Maps to CLI exit code 2 (check failed, computation itself was fine).
class PropertyFailure : public std::runtime_error {
public:
    explicit PropertyFailure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lifeline
