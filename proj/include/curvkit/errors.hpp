#pragma once

#include <stdexcept>
#include <string>

namespace curvkit {

// Base of every library error; the CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A point or finite-difference stencil left the chart domain, or a
// parameter is outside its admissible range.
class DomainError : public Error {
public:
    using Error::Error;
};

class SingularMetricError : public Error {
public:
    using Error::Error;
};

// Sectional curvature requested on a (near) lightlike plane.
class DegeneratePlaneError : public Error {
public:
    using Error::Error;
};

class EmptySampleError : public Error {
public:
    using Error::Error;
};

class UnsupportedSpaceError : public Error {
public:
    using Error::Error;
};

// Commutator that fails to land in su(2,1); signals a basis bug.
class BasisDecompositionError : public Error {
public:
    using Error::Error;
};

// Element with a nonzero h0 (e1) component where g/h0 is required.
class NonTangentError : public Error {
public:
    using Error::Error;
};

// Right-hand side of an ODE failed at a point the integrator could not avoid.
class RhsDomainError : public DomainError {
public:
    using DomainError::DomainError;
};

class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace curvkit
