#pragma once

#include <stdexcept>
#include <string>

namespace refl {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain caller input (bad dimensions, violated
// preconditions, unparsable numbers).
struct InvalidInputError : Error {
    using Error::Error;
};

// A matrix required to be invertible is numerically singular.
struct SingularMatrixError : Error {
    SingularMatrixError(const std::string& msg, int pivot)
        : Error(msg), pivot_index(pivot) {}
    int pivot_index; // offending LU pivot, -1 when not available
};

// The block fundamental matrix lost invertibility somewhere on the
// integration path.
struct SingularPathError : Error {
    SingularPathError(const std::string& msg, double where)
        : Error(msg), location(where) {}
    double location;
};

// The boundary-value problem has no unique solution (singular M_X).
struct UnsolvableBvpError : Error {
    using Error::Error;
};

// A matrix function was requested outside its principal branch.
struct BranchCutError : Error {
    using Error::Error;
};

// An iteration or series failed to converge within its configured budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// A result failed its internal accuracy validation.
struct AccuracyError : Error {
    using Error::Error;
};

// Input is valid but lands in a case the theory leaves undefined.
struct UnsupportedCaseError : Error {
    using Error::Error;
};

// Problem-file or expression syntax error.
struct ParseError : Error {
    ParseError(const std::string& msg, long at = -1) : Error(msg), offset(at) {}
    long offset; // character offset when known
};

// Runtime evaluation failure inside an expression (division by zero).
struct EvalError : Error {
    using Error::Error;
};

} // namespace refl
