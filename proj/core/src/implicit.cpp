#include "dcc/analysis.hpp"

#include "dcc/errors.hpp"
#include "internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace dcc {

double Poly3::eval(double x, double y, double z) const {
    double v = 0;
    double xp = 1;
    for (int a = 0; a <= 4; ++a) {
        double yp = 1;
        for (int b = 0; b <= 4; ++b) {
            double zp = 1;
            for (int c = 0; c <= 4; ++c) {
                if (coef[a][b][c] != 0.0) v += coef[a][b][c] * xp * yp * zp;
                zp *= z;
            }
            yp *= y;
        }
        xp *= x;
    }
    return v;
}

double Poly3::max_abs() const {
    double m = 0;
    for (const auto& pa : coef)
        for (const auto& pb : pa)
            for (double v : pb) m = std::max(m, std::abs(v));
    return m;
}

int Poly3::total_degree(double rel_tol) const {
    const double cut = rel_tol * max_abs();
    int deg = 0;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = 0; c <= 4; ++c)
                if (std::abs(coef[a][b][c]) > cut) deg = std::max(deg, a + b + c);
    return deg;
}

bool Poly3::is_zero(double tol) const { return max_abs() < tol; }

Poly3& Poly3::scale(double s) {
    for (auto& pa : coef)
        for (auto& pb : pa)
            for (double& v : pb) v *= s;
    return *this;
}

Poly3 Poly3::product(const Poly3& p, const Poly3& q) {
    Poly3 out;
    for (int a1 = 0; a1 <= 4; ++a1)
        for (int b1 = 0; b1 <= 4; ++b1)
            for (int c1 = 0; c1 <= 4; ++c1) {
                const double v1 = p.coef[a1][b1][c1];
                if (v1 == 0.0) continue;
                for (int a2 = 0; a2 + a1 <= 4; ++a2)
                    for (int b2 = 0; b2 + b1 <= 4; ++b2)
                        for (int c2 = 0; c2 + c1 <= 4; ++c2) {
                            const double v2 = q.coef[a2][b2][c2];
                            if (v2 == 0.0) continue;
                            out.coef[a1 + a2][b1 + b2][c1 + c2] += v1 * v2;
                        }
            }
    return out;
}

// Projective coefficient distance: q is rescaled so its largest-magnitude
// p-coefficient matches, then the max componentwise deviation is taken
// relative to max|p|.
double poly_distance(const Poly3& p, const Poly3& q) {
    int ia = 0, ib = 0, ic = 0;
    double best = -1;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = 0; c <= 4; ++c)
                if (std::abs(p.coef[a][b][c]) > best) {
                    best = std::abs(p.coef[a][b][c]);
                    ia = a;
                    ib = b;
                    ic = c;
                }
    if (std::abs(q.coef[ia][ib][ic]) < 1e-300)
        return std::numeric_limits<double>::infinity();
    const double s = p.coef[ia][ib][ic] / q.coef[ia][ib][ic];
    double dev = 0;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b)
            for (int c = 0; c <= 4; ++c)
                dev = std::max(dev, std::abs(p.coef[a][b][c] - s * q.coef[a][b][c]));
    return dev / std::max(p.max_abs(), 1e-30);
}

// ---- exact determinant expansion -------------------------------------------------

Poly3 implicit_det(const Patch& patch) {
    // column i of det([X w_i - u_i]) is x (i w_i) + y (j w_i) + z (k w_i) - u_i;
    // multilinearity expands the determinant over 4^4 basis picks
    std::array<std::array<Quat, 4>, 4> basis;
    for (int c = 0; c < 4; ++c)
        basis[c] = {QI * patch[c].w, QJ * patch[c].w, QK * patch[c].w,
                    patch[c].u * -1.0};

    Poly3 P;
    for (int p0 = 0; p0 < 4; ++p0)
        for (int p1 = 0; p1 < 4; ++p1)
            for (int p2 = 0; p2 < 4; ++p2)
                for (int p3 = 0; p3 < 4; ++p3) {
                    Eigen::Matrix4d M;
                    const int pick[4] = {p0, p1, p2, p3};
                    for (int c = 0; c < 4; ++c) {
                        const Quat& q = basis[c][pick[c]];
                        M(0, c) = q.r;
                        M(1, c) = q.x;
                        M(2, c) = q.y;
                        M(3, c) = q.z;
                    }
                    const double d = M.determinant();
                    if (d == 0.0) continue;
                    int e[3] = {0, 0, 0};
                    for (int c = 0; c < 4; ++c)
                        if (pick[c] < 3) ++e[pick[c]];
                    P.coef[e[0]][e[1]][e[2]] += d;
                }
    return P;
}

namespace {

// smallest-degree polynomial vanishing on the samples (SVD nullspace over
// dense monomials), or nullopt
std::optional<std::pair<int, Poly3>> fit_min_degree(
    const std::vector<std::array<double, 3>>& samples, int dmax = 4, double rcond = 1e-9) {
    for (int deg = 1; deg <= dmax; ++deg) {
        std::vector<std::array<int, 3>> exps;
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; b <= deg; ++b)
                for (int c = 0; c <= deg; ++c)
                    if (a + b + c <= deg) exps.push_back({a, b, c});
        Eigen::MatrixXd A(static_cast<Eigen::Index>(samples.size()),
                          static_cast<Eigen::Index>(exps.size()));
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& [x, y, z] = samples[i];
            for (std::size_t j = 0; j < exps.size(); ++j)
                A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::pow(x, exps[j][0]) * std::pow(y, exps[j][1]) *
                    std::pow(z, exps[j][2]);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= rcond * sv(0)) {
            const Eigen::VectorXd c = svd.matrixV().col(A.cols() - 1);
            Poly3 P;
            for (std::size_t j = 0; j < exps.size(); ++j)
                P.coef[exps[j][0]][exps[j][1]][exps[j][2]] = c(static_cast<Eigen::Index>(j));
            return std::make_pair(deg, P);
        }
    }
    return std::nullopt;
}

std::vector<std::array<double, 3>> patch_samples(const Patch& patch) {
    std::vector<std::array<double, 3>> out;
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
            const double s = 0.05 + 0.9 * i / 6.0;
            const double t = 0.05 + 0.9 * j / 6.0;
            try {
                const MPoint p = eval_patch(patch, RP1(s), RP1(t));
                if (!p.infinite) out.push_back({p.v.x, p.v.y, p.v.z});
            } catch (const Error&) {
            }
        }
    return out;
}

} // namespace

ImplicitSurface implicitize_patch(const Patch& patch) {
    const Poly3 P = implicit_det(patch);
    const double s = std::max(net_scale(patch), 1.0);
    const double zero_tol = 1e-12 * s * s * s * s;

    const auto samples = patch_samples(patch);
    const auto fit = samples.size() >= 10 ? fit_min_degree(samples) : std::nullopt;

    ImplicitSurface out;
    if (P.is_zero(zero_tol)) {
        if (!fit)
            throw IdenticallyZero("slice determinant vanishes identically and no "
                                  "low-degree equation fits the samples");
        out.f = fit->second;
        out.degree = fit->first;
        out.from_samples = true;
        return out;
    }

    const int degP = P.total_degree(1e-10);
    if (fit) {
        const auto& [degQ, Q] = *fit;
        if (degQ == degP) {
            out.f = P;
            out.degree = degP;
            return out;
        }
        if (2 * degQ == degP && poly_distance(P, Poly3::product(Q, Q)) < 1e-7) {
            out.f = Q;
            out.degree = degQ;
            out.deflated = true;
            return out;
        }
        // the determinant kept an extra factor; the sampled fit is the factor
        // vanishing on the surface
        out.f = Q;
        out.degree = degQ;
        out.from_samples = true;
        out.ambiguous = true;
        return out;
    }
    out.f = P;
    out.degree = degP;
    out.ambiguous = true;
    return out;
}

ImplicitSurface implicitize_slice(const Cube& cube, int dir, const RP1& par) {
    return implicitize_patch(slice_cube(cube, dir, par));
}

double implicit_residual(const ImplicitSurface& s, const MPoint& p) {
    if (p.infinite) return 0.0;
    const double n2 = norm2(p.v);
    const double w = std::pow(1.0 + n2, s.degree / 2.0);
    return std::abs(s.f.eval(p.v.x, p.v.y, p.v.z)) / (w * std::max(s.f.max_abs(), 1e-300));
}

} // namespace dcc
