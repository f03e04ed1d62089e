#pragma once

#include "dcc/canonical.hpp"
#include "dcc/qb.hpp"
#include "dcc/quat.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace dcc {

// ---- trivariate polynomials (total degree <= 4) -------------------------------

struct Poly3 {
    // coefficient of x^a y^b z^c
    std::array<std::array<std::array<double, 5>, 5>, 5> coef{};

    double& at(int a, int b, int c) { return coef[a][b][c]; }
    const double& at(int a, int b, int c) const { return coef[a][b][c]; }

    double eval(double x, double y, double z) const;
    double max_abs() const;
    int total_degree(double rel_tol = 1e-12) const;
    bool is_zero(double tol) const;
    Poly3& scale(double s);
    static Poly3 product(const Poly3& p, const Poly3& q); // degrees must fit
};

// Projective distance of coefficient vectors: q is rescaled to match p at
// p's largest coefficient, then the max componentwise deviation is taken
// relative to max|p|.
double poly_distance(const Poly3& p, const Poly3& q);

// ---- implicitization -----------------------------------------------------------

// 4x4 resultant determinant of a bilinear net: exact polynomial (degree <= 4)
// vanishing on the patch surface.
Poly3 implicit_det(const Patch& patch);

struct ImplicitSurface {
    Poly3 f;                   // vanishes on the surface
    int degree = 0;            // total degree of f
    bool from_samples = false; // determinant vanished; f fitted from samples
    bool deflated = false;     // determinant was proportional to f^2
    bool ambiguous = false;    // determinant kept an extra factor beyond f
};

// Implicit equation of the patch surface: the determinant when it is already
// square-free, its square root when it is a perfect square, the minimum-degree
// sampled fit when it vanishes identically (planes, spheres).  Throws
// IdenticallyZero when no equation can be produced.
ImplicitSurface implicitize_patch(const Patch& patch);
ImplicitSurface implicitize_slice(const Cube& cube, int dir, const RP1& par);

// Residual of a point against f, weighted chordally:
// |f(p)| / ((1 + |p|^2)^(deg/2) * max|coef|); infinite points use the leading
// form.
double implicit_residual(const ImplicitSurface& s, const MPoint& p);

// ---- singular locus -------------------------------------------------------------

enum class CurveKind {
    Line,
    TwoLines,
    Conic,
    BicircularQuartic,
    SpaceCurve,  // no coordinate carrier plane; polyline only
    PointCluster // isolated degenerate point
};

struct CurveDescriptor {
    int dir = 0;         // direction whose coordinate lines collapse
    CurveKind kind = CurveKind::SpaceCurve;
    int multiplicity = 1; // 2 when two parameter branches cover one image curve

    std::vector<std::array<double, 2>> params; // transverse angle pairs
    std::vector<MPoint> samples;               // ordered image polyline

    // planar data, valid when carrier_axis >= 0 (coordinate plane {axis = 0},
    // in-plane variables follow the x,y / x,z / y,z convention)
    int carrier_axis = -1;
    std::array<double, 9> bq{};    // (X^2+Y^2)^2, X(X^2+Y^2), Y(X^2+Y^2),
                                   // X^2, XY, Y^2, X, Y, 1
    std::array<double, 6> conic{}; // X^2, XY, Y^2, X, Y, 1
    std::vector<std::array<Quat, 2>> lines; // point, unit direction
    double fit_residual = 0;

    // coordinate sphere containing the curve: sigma_dir root whose slice
    // carries it, with the sample residual against that slice's implicit
    // equation
    std::optional<RP1> carrier_root;
    double carrier_residual = 0;

    double worst_jacobian = 0; // max |Jac| over sampled curve parameters
    int jac_samples = 0;       // parameters that entered the jacobian scan
    MPoint center;             // PointCluster position
};

struct SingularLocus {
    std::vector<CurveDescriptor> curves;
    std::vector<CurveDescriptor> points;
};

// Extract, group, and fit the singular curves of all three directions.
// Throws DegenerateCube when the net does not parametrize a volume.
SingularLocus singular_locus(const Cube& cube, int grid = 200);

// ---- bicircular quartics and focal points ----------------------------------------

struct BQCanonical {
    enum class Kind { SymmetricQuartic, CircularCubic, Conic };
    Kind kind = Kind::SymmetricQuartic;
    double K = 0, M = 0;
    int delta = 0; // sign of the constant term after scaling
    double mu = 1; // scaling x -> mu x bringing the quartic to
                   // (x^2+y^2)^2 - 2K x^2 + 2M y^2 + delta
};

// Canonical invariants of a symmetric bicircular quartic
// L (x^2+y^2)^2 + A x^2 + B y^2 + G; vanishing leading coefficient is
// reported as the circular-cubic or conic degeneration.  Throws
// NotSymmetricForm when odd terms are present, SingularCurve when the quartic
// is singular (zero constant term or double axis intersections).
BQCanonical bq_canonicalize(const std::array<double, 9>& c, double tol = 1e-7);

struct FocalPoints {
    double K = 0, M = 0, N = 0; // axis invariants, K M + M N + N K + delta = 0
    double b = 0;               // middle family parameter
    // focal point sets of the three coordinate-plane quartics
    std::array<std::vector<Quat>, 3> phi;
};

// Focal points of the confocal triple with invariants derived from (a, c):
// delta = -1 needs a > 0, c > 0, a c > 1; delta = +1 needs c < 0 and
// a > |c| > 1/a.  Throws OutOfRegion.
FocalPoints focal_points(int delta, double a, double c);

// ---- classification ----------------------------------------------------------------

struct Classification {
    Coarse coarse = Coarse::A;
    Subtype subtype = Subtype::A1;
    std::array<SigmaInfo, 3> sigma{};
};

// Moebius class of the cube by sigma root pattern and singular-locus shape.
// Throws DegenerateCube / UnclassifiableNumerically.
Classification classify(const Cube& cube);

// ---- map degree ---------------------------------------------------------------------

// Number of parameter preimages of a regular generic point; constant on the
// complement of the singular image.  degree() probes three independent
// generic points and requires agreement (SolverInconclusive otherwise);
// preimage_count() counts at one caller-chosen point (PointNearSingularity
// when it is within chordal distance 0.05 of the singular image).
int degree(const Cube& cube, std::uint64_t seed = 12345);
int preimage_count(const Cube& cube, const MPoint& p);

// ---- parameter involutions ------------------------------------------------------------

// The bipolar patch satisfies F(s, t) = F(1/(a s), -1/(a t)); verified on
// random samples.  nullopt when a == 0 (the involution degenerates).
std::optional<bool> involution_check(double a, int nsamples = 64,
                                     std::uint64_t seed = 7);

// ---- discriminants of the general family ----------------------------------------------

struct DiscriminantReport {
    std::array<double, 3> delta{}; // Delta_s, Delta_t, Delta_u
    std::array<bool, 3> negative{};
    bool at_most_one_negative = true;
    bool region_consistent = true; // each negative Delta obeys its region bound
    bool inside_slab = false;      // parameter box where all Delta >= 0
};
DiscriminantReport discriminant_region(double g, double h, double a, double b, double c);

// ---- plane curve utilities --------------------------------------------------------------

// Connected components of {f = 0} in the window, by sign-crossing cells
// joined through shared edges on an n x n grid.
int plane_curve_components(const std::function<double(double, double)>& f, double x0,
                           double x1, double y0, double y1, int n = 512);

// Marching-squares polylines of {f = 0} (segment endpoints linearly
// interpolated, chained across cells).
std::vector<std::vector<std::array<double, 2>>>
plane_curve_polylines(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, int n = 256);

} // namespace dcc
