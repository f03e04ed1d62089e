#pragma once

#include "dcc/qb.hpp"
#include "dcc/quat.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcc {

// Moebius classes of cyclidic cubes.  Coarse type by the root pattern of the
// three sigma polynomials, subtype by the singular locus.
enum class Coarse { A, B, O, S };
enum class Subtype { A1, A2, A3, A4, B, O1, O2, S1, S2, S3, S4 };

std::string_view to_string(Coarse c);
std::string_view to_string(Subtype s);
Coarse coarse_of(Subtype s);

// ---- canonical family representatives --------------------------------------
// Control nets are exact (integer combinations of the family parameters);
// every builder checks its validity region and throws InvalidParameter with
// the violated constraint.

// Three concurrent coordinate planes with edge ratios (a, b, c); coarse type A.
Cube type_a_cube(double a, double b, double c);

// Degenerate three-plane system whose singular curve is a pair of crossing
// lines; subtype A4.  Requires a != -1.
Cube type_a4_cube(double a);

// Two orthogonal planes plus the pencil spheres; one complex sigma, type B,
// except on the boundary c = a^2 where it degenerates to type O.
Cube two_plane_cube(double a, double b, double c);

// Symmetric type-B system with parameters (k, m).  Requires k, m not in
// {0, 1, -1}, k != -m, k m != 1, and (k + m)^2 != (k m - 1)^2.
Cube type_b_cube(double k, double m);

// Offset family with two coinciding sphere roots in one direction and an
// elliptic-hyperbolic singular pair; subtype O1.  Requires h not in {0, 1, -1}.
Cube offset_o1_cube(double h);

// Offset family over the parabolic cyclide; subtype O2.
Cube offset_o2_cube();

// Concentric sphere pencil swept between two antipodal nets; subtype S1.
Cube s1_cube(double a);

// Offset of the one-polar (tangent-circle) patch; subtype S2.
Cube offset_1polar_cube();

// Generic system built from corner circles through p1 = 0, p2 = k,
// p4 = g i + h j with p0 = inf and edge ratios (a, b, c); the family whose
// discriminants cover all coarse types.
Cube general_cube(double g, double h, double a, double b, double c);

// Planar patches used by the spherical constructions.
Patch bipolar_patch(double a); // poles at +-sqrt(a) on the x-axis
Patch onepolar_patch();        // tangent circles, pole at the origin

// Spherical subtypes: S1(a), S2(), S3(a) with a < 0, S4().
Cube spherical_cube(Subtype which, double a = 0);

// ---- catalog -----------------------------------------------------------------

struct CatalogEntry {
    std::string label;
    Cube cube;
    Subtype expected;
};

// Reference cubes spanning every subtype, including degenerate placements
// (poles on the rotation axis, axis through the pole, planar carriers).
const std::vector<CatalogEntry>& catalog();

// ---- family construction by name (CLI entry point) ---------------------------

struct Family {
    Cube cube;
    std::string label;
    std::vector<double> params;
    std::string expected; // expected classification note
};

// Labels: A(a,b,c), A4(a), TP(a,b,c), B(k,m), O1(h), O2(), S1(a), S2(),
// S3(a), S4(), GEN(g,h,a,b,c).  Throws InvalidParameter for unknown labels,
// wrong parameter counts, or out-of-region parameters.
Family make_family(std::string_view label, std::span<const double> params);

// Random Moebius similarity of the net: rotation, scaling, translation, and on
// even k an extra sphere inversion centered outside the unit ball.  Preserves
// the Moebius class.
class Rng;
Cube random_mobius_move(const Cube& cube, int k, Rng& rng);

} // namespace dcc
