#pragma once

#include <stdexcept>
#include <string>

namespace turbosim {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad spec files, bad traces, bad configuration.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A domain invariant does not hold (preconditions, spec validation).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// No feasible assignment exists under the power budget.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// An instance exceeds a deliberate size guard (e.g. the enumeration oracle).
class GuardError : public Error {
public:
    using Error::Error;
};

} // namespace turbosim
