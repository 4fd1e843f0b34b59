#ifndef TPFLAG_ERRORS_HPP
#define TPFLAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tpflag {

/// Root of the library's error hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input (bad JSON, unparsable rational, wrong shape).
class InputError : public Error {
public:
    using Error::Error;
};

/// A well-formed input that lies outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A required trailing principal minor vanished: g is outside the open cell U+ T U-.
class DecompositionUnavailable : public DomainError {
public:
    using DomainError::DomainError;
};

/// The unipotent matrix is not in the requested positive cell U-(w) / U+(w).
class NotInCell : public DomainError {
public:
    using DomainError::DomainError;
};

class NotTotallyPositive : public DomainError {
public:
    using DomainError::DomainError;
};

/// t u t^-1 u'^-1 is not in U-_{>0}.
class NotInTorusSet : public DomainError {
public:
    using DomainError::DomainError;
};

/// g is not an element of the given Borel subgroup.
class NotInFibre : public DomainError {
public:
    using DomainError::DomainError;
};

/// A membership that a theorem guarantees failed. Never expected to fire.
class MembershipViolation : public DomainError {
public:
    using DomainError::DomainError;
};

/// Eigenvalues of a float computation are too close, complex, or non-positive.
class EigenvalueCollision : public DomainError {
public:
    using DomainError::DomainError;
};

/// No start of the multi-start Newton solver met the residual tolerance.
class NoConvergence : public Error {
public:
    using Error::Error;
};

}  // namespace tpflag

#endif  // TPFLAG_ERRORS_HPP
