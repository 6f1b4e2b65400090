#ifndef DINCL_ERRORS_HPP
#define DINCL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dincl {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, negative radius, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Invalid system description: unparsable expression, uncovered sign pattern, bad box.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A vector field or switching function produced a non-finite value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// The integrator could not continue (non-finite state, stagnation).
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace dincl

#endif // DINCL_ERRORS_HPP
