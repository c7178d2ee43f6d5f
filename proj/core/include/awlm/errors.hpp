#pragma once

#include <stdexcept>
#include <string>

namespace awlm {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed inputs: broken simplex vectors, bad menus, out-of-range parameters.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The data contradict the model class (ratio inconsistency, negative
/// recovered masses, leverage-line violations hit as hard errors).
class ModelViolationError : public Error {
public:
    using Error::Error;
};

/// The question has no unique answer on this input: degenerate exposure
/// pairs, under-identified datasets, disconnected menu families.
class DegenerateError : public Error {
public:
    using Error::Error;
};

} // namespace awlm
