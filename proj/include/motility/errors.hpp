#pragma once

#include <stdexcept>
#include <string>

namespace motility {

// Base class for all numerical failures raised by this library.  The CLI maps
// these to a dedicated exit code so scripted callers can tell "the math broke"
// apart from "you called it wrong" (std::invalid_argument).
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Potential well fails its shape requirements (negative W inside the wall,
// missing zeros at 0 and 1, ...).
struct DegenerateWell : NumericsError {
    using NumericsError::NumericsError;
};

// Standing-wave integration produced a non-monotone profile.
struct NonMonotoneProfile : NumericsError {
    using NumericsError::NumericsError;
};

// Tridiagonal elimination hit a vanishing pivot, or a system was requested
// outside its diagonal-dominance envelope.
struct SingularSystem : NumericsError {
    using NumericsError::NumericsError;
};

// An arc integration stalled: the slope ODE right-hand side has a root below
// the requested stop slope, so the target slope is never reached.
struct StalledArc : NumericsError {
    using NumericsError::NumericsError;
};

// An arc integration ran past its maximum admissible span in x.
struct SpanExceeded : NumericsError {
    using NumericsError::NumericsError;
};

// The arc right-hand side is not positive at the start of the integration.
struct NonPositiveRhs : NumericsError {
    using NumericsError::NumericsError;
};

// A bisection could not establish a bracket on the supplied interval.
struct BracketFailure : NumericsError {
    using NumericsError::NumericsError;
};

// A curve tangent degenerated (zero length), so normals/curvature are undefined.
struct DegenerateTangent : NumericsError {
    using NumericsError::NumericsError;
};

// The per-step area-restoring iteration failed to converge.
struct AreaLoopDiverged : NumericsError {
    using NumericsError::NumericsError;
};

// Adaptive quadrature could not reach the requested tolerance.
struct QuadratureError : NumericsError {
    using NumericsError::NumericsError;
};

}  // namespace motility
