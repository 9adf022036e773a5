#pragma once

#include <stdexcept>
#include <string>

namespace cigar {

// Base class so callers can catch anything thrown by this library at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point lies outside the domain of a chart or closed-form expression.
struct DomainError : Error { using Error::Error; };

// Metric determinant fell below the positivity floor.
struct SingularMetricError : Error { using Error::Error; };

// Adaptive finite differencing could not reconcile two step sizes.
struct StepSizeError : Error { using Error::Error; };

// A classification looked like an identity on the sample but failed off it.
struct DegenerateSampleError : Error { using Error::Error; };

// rho = 1/2 collapses the soliton scaling; closed forms divide by (1 - 2 rho).
struct DegenerateRhoError : Error { using Error::Error; };

// Field-family parameter constraint violated (negative radicand and the like).
struct ConstraintError : Error { using Error::Error; };

// Name not present in a catalog / lookup table.
struct UnknownNameError : Error { using Error::Error; };

// Malformed or out-of-range argument.
struct ParameterError : Error { using Error::Error; };

// Geodesic integration ran into the cone point with angular momentum.
struct TipProximityError : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

} // namespace cigar
