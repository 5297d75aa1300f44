#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qpr {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : Error {
    SingularMatrixError() : Error("matrix is singular") {}
    explicit SingularMatrixError(const std::string& what) : Error(what) {}
};

// A right-hand-side column lies outside the column space of the coefficient
// matrix; `column` is the offending 0-based column index.
struct InconsistentColumnError : Error {
    std::size_t column;
    explicit InconsistentColumnError(std::size_t col)
        : Error("column " + std::to_string(col) + " is outside the column space"),
          column(col) {}
};

// rank(B) < n: the system is redundant and outside the standard form this
// library operates on.
struct NonMaximalRankError : Error {
    std::size_t rank;
    explicit NonMaximalRankError(std::size_t r)
        : Error("exponent matrix has non-maximal rank " + std::to_string(r)), rank(r) {}
};

struct EmptySystemError : Error {
    EmptySystemError() : Error("system has no quasimonomials and no linear part") {}
};

struct ZeroPrefactorError : Error {
    ZeroPrefactorError() : Error("new-time prefactor must be nonzero") {}
};

struct UnboundParameterError : Error {
    std::string name;
    explicit UnboundParameterError(std::string param)
        : Error("unbound parameter \"" + param + "\""), name(std::move(param)) {}
};

struct NonPositiveStateError : Error {
    NonPositiveStateError() : Error("state must lie in the positive orthant") {}
    explicit NonPositiveStateError(const std::string& what) : Error(what) {}
};

// Left-kernel construction requested on a full-rank coefficient matrix.
struct FullRankError : Error {
    FullRankError() : Error("coefficient matrix has full rank; no kernel variables") {}
};

struct PolicyInfeasibleError : Error {
    explicit PolicyInfeasibleError(const std::string& what) : Error(what) {}
};

// An operation was invoked on a system of the wrong case.
struct WrongCaseError : Error {
    explicit WrongCaseError(const std::string& what) : Error(what) {}
};

struct LeftPositiveOrthantError : Error {
    double t;
    explicit LeftPositiveOrthantError(double when)
        : Error("trajectory left the positive orthant at t = " + std::to_string(when)),
          t(when) {}
};

struct StepSizeUnderflowError : Error {
    double t;
    explicit StepSizeUnderflowError(double when, const std::string& why = "step size underflow")
        : Error(why + " at t = " + std::to_string(when)), t(when) {}
};

}  // namespace qpr
