// Error types shared across the library. Each maps onto one CLI exit code.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcap {

// Malformed input files, invariant violations in user-supplied data,
// precondition failures on operation arguments.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver hit its iteration cap before reaching the requested
// tolerance.  The partial result (best brackets) travels separately.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A certification pass found a violated model condition.
struct CheckError : std::runtime_error {
    explicit CheckError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds the configured memory budget.  Carries the
// budget that would have been required so callers can report it.
struct BudgetError : std::runtime_error {
    BudgetError(const std::string& what, std::size_t required, std::size_t budget)
        : std::runtime_error(what), required_symbols(required), budget_symbols(budget) {}
    std::size_t required_symbols;
    std::size_t budget_symbols;
};

// Exhaustive enumeration requested on a network too large for it.
struct EnumerationError : std::runtime_error {
    explicit EnumerationError(const std::string& what) : std::runtime_error(what) {}
};

// A network channel role has no implemented model candidates.
struct CandidateError : std::runtime_error {
    explicit CandidateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netcap
