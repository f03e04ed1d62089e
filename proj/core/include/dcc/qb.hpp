#pragma once

#include "dcc/quat.hpp"

#include <array>
#include <optional>

namespace dcc {

// Point of the real projective line: parameter value num/den, (1, 0) = inf.
struct RP1 {
    double num = 0;
    double den = 1;

    constexpr RP1() = default;
    constexpr RP1(double value) : num(value), den(1) {}
    constexpr RP1(double n, double d) : num(n), den(d) {}
    static constexpr RP1 infinity() { return RP1(1, 0); }
    constexpr bool is_infinity() const { return den == 0; }
};

// Homogeneous control column: the pair (u, w) representing u * w^{-1}.
struct Hom {
    Quat u{};
    Quat w{};
};

// Value of the quadric S(u, w) = <u, w> on a column.  Control columns of the
// nets in this library satisfy S = 0.
constexpr double study(const Hom& c) { return dot(c.u, c.w); }

// Bilinear control net: columns indexed n = i + 2j for (s, t) = (i, j).
struct Patch {
    std::array<Hom, 4> c{};
    Hom& operator[](std::size_t n) { return c[n]; }
    const Hom& operator[](std::size_t n) const { return c[n]; }
};

// Trilinear control net: columns indexed n = i + 2j + 4k for (s, t, u) = (i, j, k).
struct Cube {
    std::array<Hom, 8> c{};
    Hom& operator[](std::size_t n) { return c[n]; }
    const Hom& operator[](std::size_t n) const { return c[n]; }
};

// Largest absolute control coordinate; the natural scale of a net.
double net_scale(const Cube& cube);
double net_scale(const Patch& patch);

// u * w^{-1} as a Moebius point; w ~ 0 gives inf, both ~ 0 throws ZeroPair.
MPoint proj_div(const Quat& u, const Quat& w, double tol = 1e-13);
MPoint proj_div(const Hom& c, double tol = 1e-13);

// Degree-1 Bernstein weights of a projective parameter: (den - num, num).
// The normalized form divides by hypot(num, den) first.
std::array<double, 2> bern_weights(const RP1& t, bool normalized);

// Homogeneous evaluation with normalized weights.
Hom eval_hom(const Cube& cube, const RP1& s, const RP1& t, const RP1& u);
Hom eval_hom(const Patch& patch, const RP1& s, const RP1& t);

// Surface point F(s, t, u); throws IndeterminatePoint at a base point.
MPoint eval_cube(const Cube& cube, const RP1& s, const RP1& t, const RP1& u);
MPoint eval_patch(const Patch& patch, const RP1& s, const RP1& t);

// First-order data at affine parameters.  Throws PoleEncountered when the
// value is infinite.
struct FirstOrder {
    MPoint value;
    std::array<Quat, 3> dir; // imaginary partial vectors dF/ds, dF/dt, dF/du
};
FirstOrder partials(const Cube& cube, double s, double t, double u);

struct PatchFirstOrder {
    MPoint value;
    std::array<Quat, 2> dir;
};
PatchFirstOrder partials(const Patch& patch, double s, double t);

// det of the three partial vectors; vanishes iff the parametrization is
// singular at the point.
double jacobian(const Cube& cube, double s, double t, double u);

// Midpoint of the projective arc between two columns: (u0+u1, w0+w1).
// Throws DegenerateArc when the endpoints coincide projectively.
MPoint farin_point(const Hom& a, const Hom& b, double tol = 1e-10);

// Column n scaled by l1^i * l2^j * l3^k; reparametrizes each direction by a
// projective map fixing 0 and infinity.  Throws ZeroMultiplier.
Cube reparametrize_interior(const Cube& cube, double l1, double l2, double l3);

// Control-net actions inducing Moebius transformations of the surface.
Cube net_translate(const Cube& cube, const Quat& a);
Cube net_scale_by(const Cube& cube, double lambda);
Cube net_rotate(const Cube& cube, const Quat& r); // unit r, F -> r F r^{-1}
Cube apply_inversion_to_net(const Cube& cube, const Quat& q, double r2);
Patch net_translate(const Patch& patch, const Quat& a);
Patch net_scale_by(const Patch& patch, double lambda);
Patch net_rotate(const Patch& patch, const Quat& r);
Patch apply_inversion_to_net(const Patch& patch, const Quat& q, double r2);

class MobiusMap;
Cube apply_mobius_to_net(const MobiusMap& m, const Cube& cube);

// Coordinate slice: bilinear net of the surface s_d = par.  Raw (unnormalized)
// Bernstein weights, so slice columns are exact linear combinations of cube
// columns.  Transverse directions keep their increasing-index order.
Patch slice_cube(const Cube& cube, int dir, const RP1& par);

// Quadratic polynomial sigma_d whose roots are the slice parameters where the
// coordinate sphere degenerates.  Coefficients (c0, c1, c2) represent
// c0 d^2 + c1 n d + c2 n^2 at par = (n, d), computed from the column pair
// (0, 3) or (1, 2) of the slice net.
std::array<double, 3> sigma_poly(const Cube& cube, int dir, int pair = 0);

// sigma for all three directions (column pair (0, 3)).
std::array<std::array<double, 3>, 3> spherical_polys(const Cube& cube);

// Root analysis of one sigma polynomial at net scale.
struct SigmaInfo {
    enum class Kind { Zero, Complex, DoubleRoot, Distinct };
    std::array<double, 3> c{};
    double disc = 0;
    Kind kind = Kind::Distinct;
    std::array<RP1, 2> roots{}; // real parts when complex; meaningless when zero
};
SigmaInfo sigma_info(const Cube& cube, int dir);

// Embedding of a homogeneous pair into the unit sphere of R^4; agrees with
// chordal_embedding(proj_div(c)) and is smooth through w = 0.
std::array<double, 4> sphere_embedding(const Hom& c);

// Degeneracy type of a coordinate slice, decided by the affine rank of
// chordal embeddings of sample points: 0 = point, <= 2 = circle, else sphere.
enum class SliceKind { Point, Circle, Sphere };
SliceKind slice_kind(const Cube& cube, int dir, const RP1& par, double tol = 1e-7);

} // namespace dcc
