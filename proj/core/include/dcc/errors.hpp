#pragma once

#include <stdexcept>
#include <string>

namespace dcc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- quaternion / Moebius layer ----------------------------------------

// Cross-ratio requested with a repeated point in a position where the
// formula needs a difference to be invertible.
struct CoincidentPoints : Error { using Error::Error; };

// ---- quaternionic Bernstein layer ---------------------------------------

// proj_div(u, w) with both arguments (numerically) zero.
struct ZeroPair : Error { using Error::Error; };

// Evaluation hit a base point: homogeneous pair (U, W) vanished.
struct IndeterminatePoint : Error { using Error::Error; };

// Derivative requested where the denominator W vanishes.
struct PoleEncountered : Error { using Error::Error; };

// Farin point of an arc whose endpoints coincide.
struct DegenerateArc : Error { using Error::Error; };

// Interior reparametrization with a zero multiplier.
struct ZeroMultiplier : Error { using Error::Error; };

// ---- construction layer --------------------------------------------------

struct NonCollinearInput : Error { using Error::Error; };
struct NonOrthogonalTangents : Error { using Error::Error; };
struct NonConcyclicCorners : Error { using Error::Error; };
struct DegenerateTriangle : Error { using Error::Error; };
struct IncompatibleFaces : Error { using Error::Error; };

// Family parameter outside the validity region of a canonical model.
struct InvalidParameter : Error { using Error::Error; };

// ---- analysis layer --------------------------------------------------------

// Implicitization produced the zero polynomial and no sampled fallback.
struct IdenticallyZero : Error { using Error::Error; };

// Control net does not define a surface (Jacobian vanishes identically, or
// the net collapses to a point / curve).
struct DegenerateCube : Error { using Error::Error; };

// Classification routines could not reach a stable verdict.
struct UnclassifiableNumerically : Error { using Error::Error; };

// Degree evaluation at a point too close to the singular locus.
struct PointNearSingularity : Error { using Error::Error; };

// Preimage counts disagree between probe points.
struct SolverInconclusive : Error { using Error::Error; };

// Focal-point parameters outside the admissible (delta, a, c) region.
struct OutOfRegion : Error { using Error::Error; };

// Quartic is singular; canonical focal form undefined.
struct SingularCurve : Error { using Error::Error; };

// Quartic not in symmetric position (odd-degree terms present).
struct NotSymmetricForm : Error { using Error::Error; };

// ---- io layer ---------------------------------------------------------------

struct ParseError : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };
struct DegenerateSlice : Error { using Error::Error; };

} // namespace dcc
