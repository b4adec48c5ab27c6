#pragma once

#include <stdexcept>
#include <string>

namespace toda {

// Bad input or a request outside the domain of an operation. CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that could not be completed. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BoundaryReached : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BandEdge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NearResonance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateSurface : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BasisConventionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ThetaZero : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OutsideZone : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class FlatScenario : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace toda
