#pragma once

#include <stdexcept>
#include <string>

namespace recoflow {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An integer argument (site index, partition index, lattice size) is out of range.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// A structured value (partition, fragment, distribution, generator) is malformed.
class ValidityError : public Error {
public:
    using Error::Error;
};

/// Two arguments that must share a carrier or site count do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A requested computation exceeds the configured work ceiling.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Input is degenerate for the requested operation (e.g. no proper recombination).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A state sits on the simplex boundary where a logarithm is undefined.
class BoundaryError : public Error {
public:
    using Error::Error;
};

/// A Markov generator jumps against the direction required by its potential.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

/// A refinement-order precondition between two partitions fails.
class OrderError : public Error {
public:
    using Error::Error;
};

/// A tuple argument has the wrong length for its partition.
class ArityError : public Error {
public:
    using Error::Error;
};

/// An evaluation time lies beyond the simulated horizon.
class HorizonError : public Error {
public:
    using Error::Error;
};

/// Numerical integration left the admissible region (step size too large).
class InstabilityError : public Error {
public:
    using Error::Error;
};

/// A reaction set violates strong reversibility (unpaired reaction found).
class ReversibilityError : public Error {
public:
    using Error::Error;
};

/// A matrix expected to be symmetric is not, beyond tolerance.
class SymmetryError : public Error {
public:
    using Error::Error;
};

/// A scalar argument lies outside the mathematical domain (e.g. negative mass).
class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace recoflow
