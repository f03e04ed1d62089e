#pragma once

// Helpers shared by the analysis translation units.  Not installed.

#include "dcc/qb.hpp"
#include "dcc/quat.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace dcc::detail {

// max(max |net entry|, 1)^2, the scale reference of degeneracy thresholds
double net_scale2(const Cube& cube);

// Study sphere embedding of the homogeneous pair (u, w); unit 4-vector.
std::array<double, 4> vemb(const Quat& u, const Quat& w);
std::array<double, 4> emb_point(const MPoint& p);

inline double emb_dist(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return 0.5 * std::sqrt(s); // equals the chordal distance of the points
}

MPoint emb_to_point(std::array<double, 4> e);

// Evaluate a 2x2 slice net at angle parameters (sin th, cos th) with raw
// Bernstein weights.
Hom slice_eval(const Patch& snet, double tha, double thb);

// distance on the angle torus [-pi/2, pi/2)^2 (period pi in each factor)
double torus_dist(const std::array<double, 2>& a, const std::array<double, 2>& b);
double wrap_angle(double t); // into [-pi/2, pi/2)

// ---- collapse machinery (singular.cpp) -------------------------------------------

struct CollapseSet {
    std::vector<std::array<double, 2>> params; // transverse angle pairs
    std::vector<MPoint> images;
};

// Parameters of the dir-transverse coordinate curves that collapse to points:
// grid scan of the two boundary slices, damped Gauss-Newton refinement,
// sequential thinning at half the grid step.
std::vector<std::array<double, 2>> collapse_points(const Cube& cube, int dir,
                                                   int grid = 200, double tau = 0.35,
                                                   double tol = 1e-11);
std::vector<MPoint> collapse_images(const Cube& cube, int dir,
                                    const std::vector<std::array<double, 2>>& pts);
CollapseSet collapse_set(const Cube& cube, int dir, int grid = 200);

// Component grouping: chains on the parameter torus at 2.5 pi / grid, then
// components whose images touch (min pairwise chordal < eps_img) are merged.
std::vector<std::vector<int>> singular_components(const std::vector<std::array<double, 2>>& pts,
                                                  const std::vector<MPoint>& imgs,
                                                  int grid = 200, double eps_img = 2e-3);

// Group component indices whose images coincide as sets (mutual near-fraction
// above frac); a group of two parameter chains over one image curve is a
// double cover.
std::vector<std::vector<int>> merge_image_groups(const std::vector<std::vector<int>>& comps,
                                                 const std::vector<MPoint>& imgs,
                                                 double eps = 1e-5, double frac = 0.9);

// chains on the angle torus at link radius `spacing`
std::vector<std::vector<int>> torus_components(const std::vector<std::array<double, 2>>& pts,
                                               double spacing);

// (point, P*) when the dir-slice at par degenerates to a single point
std::optional<MPoint> point_slice(const Cube& cube, int dir, const RP1& par,
                                  double tol = 1e-8);

// curve components (>= min_samples samples and chordal diameter > diam) vs
// isolated point clusters
void split_curves_points(const std::vector<std::vector<int>>& comps,
                         const std::vector<MPoint>& imgs,
                         std::vector<std::vector<int>>& curves,
                         std::vector<std::vector<int>>& points, int min_samples = 8,
                         double diam = 1e-3);

// coordinate plane {x_axis = 0} containing all finite images, or -1.
// In-plane variables: z=0 -> (x,y), y=0 -> (x,z), x=0 -> (y,z).
int carrier_plane(const std::vector<MPoint>& imgs, double tol = 1e-7);
std::array<int, 2> plane_vars(int axis); // quaternion component indices (1..3)

// throws DegenerateCube when the trilinear jacobian is numerically zero
// across a parameter sample
void require_nondegenerate(const Cube& cube);

// ---- linear algebra ---------------------------------------------------------------

// Right-singular vector of the smallest singular value; residual gets
// s_min / max(s_max, 1e-300).
Eigen::VectorXd svd_nullspace(const Eigen::MatrixXd& rows, double* residual = nullptr);

} // namespace dcc::detail
