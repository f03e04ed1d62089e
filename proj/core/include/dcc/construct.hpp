#pragma once

#include "dcc/qb.hpp"
#include "dcc/quat.hpp"

#include <array>

namespace dcc {

// Bilinear net with corner F(0,0) at infinity: corners p1 = F(1,0),
// p2 = F(0,1), p3 = F(1,1) must be collinear, and the tangent spins v1, v2
// (imaginary) must be orthogonal.  Throws NonCollinearInput /
// NonOrthogonalTangents.
Patch patch_weights_infinite(const Quat& p1, const Quat& p2, const Quat& p3,
                             const Quat& v1, const Quat& v2, double tol = 1e-9);

// Bilinear net through four concyclic finite corners with corner-0 edge
// spins v1, v2.  Throws NonConcyclicCorners.
Patch patch_weights_finite(const Quat& p0, const Quat& p1, const Quat& p2, const Quat& p3,
                           const Quat& v1 = Quat(1), const Quat& v2 = Quat(1),
                           double tol = 1e-8);

// Miquel point of the triangle (p0, p1, p2) with side ratios lam: the second
// common point of the three circles through a vertex and its two adjacent
// side points.  lam = (1/2, 1/2, 1/2) gives the circumcenter.  Throws
// DegenerateTriangle.
Quat miquel_point(const Quat& p0, const Quat& p1, const Quat& p2,
                  const std::array<double, 3>& lam);

// q_i = (1 - lam_i) p_{i+1} + lam_i p_{i+2}, indices cyclic.
std::array<Quat, 3> side_points(const Quat& p0, const Quat& p1, const Quat& p2,
                                const std::array<double, 3>& lam);

// Fourth column of a principal patch from three columns and the diagonal
// corner point.
Hom complete_face(const Hom& c00, const Hom& c10, const Hom& c01, const MPoint& p11);

// Cube from its three faces through corner 0:
//   f_st -> columns (0, 1, 2, 3), f_su -> (0, 1, 4, 5), f_tu -> (0, 2, 4, 6).
// Corner points and edge Farin points must agree (Farin tolerance
// 1e-8 * bounding-box diagonal); the last corner is the Miquel point of the
// triangle obtained by inverting at p0, and the final column must agree
// across the three faces containing it.  Throws IncompatibleFaces /
// DegenerateTriangle.
Cube complete_cube(const Patch& f_st, const Patch& f_su, const Patch& f_tu);

// Unit normal direction n0 of the patch at corner 0 (cross product of the
// corner partials); falls back to an interior point, transported back to the
// corner gauge, when the corner data is degenerate.
Quat patch_normal(const Patch& patch);

// Cube whose u = 0 face is the patch and whose u-lines are straight segments
// of length |d|: columns (u_i - d w_i n0, w_i) on top.  Every slice u = const
// is a parallel offset at distance |u d|.  d = 0 throws InvalidParameter.
Cube offset_cube(const Patch& patch, double d);
Cube offset_cube(const Patch& patch, const Quat& n0, double d);

// Cube whose u-lines are circles of revolution around the axis through the
// origin: top columns (axis u_i, axis w_i), axis a unit imaginary quaternion.
Cube axial_cube(const Patch& patch, const Quat& axis);

} // namespace dcc
