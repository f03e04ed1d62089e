#include "dcc/analysis.hpp"

#include "dcc/errors.hpp"
#include "internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace dcc::detail {

double net_scale2(const Cube& cube) {
    const double s = std::max(net_scale(cube), 1.0);
    return s * s;
}

std::array<double, 4> vemb(const Quat& u, const Quat& w) {
    const Quat q = u * conj(w);
    const double nu = norm2(u), nw = norm2(w);
    const double den = nu + nw;
    return {2 * q.x / den, 2 * q.y / den, 2 * q.z / den, (nu - nw) / den};
}

std::array<double, 4> emb_point(const MPoint& p) { return chordal_embedding(p); }

MPoint emb_to_point(std::array<double, 4> e) {
    const double n = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2] + e[3] * e[3]);
    for (auto& v : e) v /= n;
    if (e[3] > 1.0 - 1e-9) return MPoint::infinity();
    const double f = 1.0 / (1.0 - e[3]);
    return MPoint(Quat::vec(e[0] * f, e[1] * f, e[2] * f));
}

Hom slice_eval(const Patch& snet, double tha, double thb) {
    const double ba[2] = {std::cos(tha) - std::sin(tha), std::sin(tha)};
    const double bb[2] = {std::cos(thb) - std::sin(thb), std::sin(thb)};
    Hom out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double wgt = ba[i] * bb[j];
            out.u = out.u + snet[i + 2 * j].u * wgt;
            out.w = out.w + snet[i + 2 * j].w * wgt;
        }
    return out;
}

double wrap_angle(double t) {
    double r = std::fmod(t + M_PI / 2, M_PI);
    if (r < 0) r += M_PI;
    return r - M_PI / 2;
}

double torus_dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    double d0 = std::abs(a[0] - b[0]);
    d0 = std::min(d0, M_PI - d0);
    double d1 = std::abs(a[1] - b[1]);
    d1 = std::min(d1, M_PI - d1);
    return std::hypot(d0, d1);
}

namespace {

std::array<double, 4> collapse_res(const Patch& n0, const Patch& n1, double a, double b) {
    const Hom e0 = slice_eval(n0, a, b);
    const Hom e1 = slice_eval(n1, a, b);
    const auto v0 = vemb(e0.u, e0.w);
    const auto v1 = vemb(e1.u, e1.w);
    return {v0[0] - v1[0], v0[1] - v1[1], v0[2] - v1[2], v0[3] - v1[3]};
}

double res_norm(const std::array<double, 4>& r) {
    double s = 0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
}

// connected components of an adjacency predicate over n items, each sorted,
// in order of their smallest member
template <class Adj>
std::vector<std::vector<int>> adj_components(int n, Adj&& adjacent) {
    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> comps;
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        std::vector<int> stack{i}, cur;
        seen[i] = 1;
        while (!stack.empty()) {
            const int k = stack.back();
            stack.pop_back();
            cur.push_back(k);
            for (int j = 0; j < n; ++j)
                if (!seen[j] && adjacent(k, j)) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
        }
        std::sort(cur.begin(), cur.end());
        comps.push_back(std::move(cur));
    }
    return comps;
}

std::vector<double> chordal_matrix(const std::vector<MPoint>& imgs) {
    const int n = static_cast<int>(imgs.size());
    std::vector<std::array<double, 4>> E(n);
    for (int i = 0; i < n; ++i) E[i] = emb_point(imgs[i]);
    std::vector<double> D(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D[static_cast<std::size_t>(i) * n + j] = emb_dist(E[i], E[j]);
    return D;
}

} // namespace

std::vector<std::array<double, 2>> collapse_points(const Cube& cube, int dir, int grid,
                                                   double tau, double tol) {
    const Patch n0 = slice_cube(cube, dir, RP1(0.0, 1.0));
    const Patch n1 = slice_cube(cube, dir, RP1(1.0, 0.0));

    std::vector<std::array<double, 2>> X;
    for (int i = 0; i < grid; ++i) {
        const double tha = -M_PI / 2 + i * M_PI / grid;
        for (int j = 0; j < grid; ++j) {
            const double thb = -M_PI / 2 + j * M_PI / grid;
            if (res_norm(collapse_res(n0, n1, tha, thb)) < tau) X.push_back({tha, thb});
        }
    }
    if (X.empty()) return {};

    // damped Gauss-Newton; the Tikhonov shift keeps rank-1 Jacobians (curves
    // of solutions) converging perpendicular to the curve
    const double h = 1e-7;
    for (int it = 0; it < 60; ++it) {
        for (auto& x : X) {
            const auto r = collapse_res(n0, n1, x[0], x[1]);
            const auto ra = collapse_res(n0, n1, x[0] + h, x[1]);
            const auto rb = collapse_res(n0, n1, x[0], x[1] + h);
            double jaa = 0, jab = 0, jbb = 0, ga = 0, gb = 0;
            for (int c = 0; c < 4; ++c) {
                const double ja = (ra[c] - r[c]) / h;
                const double jb = (rb[c] - r[c]) / h;
                jaa += ja * ja;
                jab += ja * jb;
                jbb += jb * jb;
                ga += ja * r[c];
                gb += jb * r[c];
            }
            const double lam = 1e-12 * (jaa + jbb + 1e-30);
            jaa += lam;
            jbb += lam;
            double s0 = 0, s1 = 0;
            const bool finite = std::isfinite(jaa) && std::isfinite(jab) &&
                                std::isfinite(jbb) && std::isfinite(ga) && std::isfinite(gb);
            if (finite) {
                const double det = jaa * jbb - jab * jab;
                if (std::isfinite(det) && det > 0) {
                    s0 = -(jbb * ga - jab * gb) / det;
                    s1 = -(jaa * gb - jab * ga) / det;
                }
            }
            const double sn = std::hypot(s0, s1);
            if (sn > 0.2) {
                s0 *= 0.2 / sn;
                s1 *= 0.2 / sn;
            }
            x[0] += s0;
            x[1] += s1;
        }
    }

    std::vector<std::array<double, 2>> keep;
    const double cell = 0.5 * M_PI / grid;
    for (const auto& x : X) {
        const double rn = res_norm(collapse_res(n0, n1, x[0], x[1]));
        if (!(rn < tol)) continue;
        const std::array<double, 2> w{wrap_angle(x[0]), wrap_angle(x[1])};
        bool sep = true;
        for (const auto& k : keep)
            if (torus_dist(w, k) < cell) {
                sep = false;
                break;
            }
        if (sep) keep.push_back(w);
    }
    return keep;
}

std::vector<MPoint> collapse_images(const Cube& cube, int dir,
                                    const std::vector<std::array<double, 2>>& pts) {
    static const RP1 tries[4] = {RP1(0.0, 1.0), RP1(1.0, 0.0), RP1(0.3, 1.0), RP1(1.0, 0.3)};
    const int o0 = dir == 0 ? 1 : 0;
    const int o1 = dir == 2 ? 1 : 2;
    std::vector<MPoint> out;
    out.reserve(pts.size());
    for (const auto& [tha, thb] : pts) {
        bool found = false;
        MPoint img = MPoint::infinity();
        for (const RP1& dp : tries) {
            RP1 pars[3];
            pars[dir] = dp;
            pars[o0] = RP1(std::sin(tha), std::cos(tha));
            pars[o1] = RP1(std::sin(thb), std::cos(thb));
            const Hom e = eval_hom(cube, pars[0], pars[1], pars[2]);
            const double nu = norm2(e.u), nw = norm2(e.w);
            if (nu + nw < 1e-20) continue;
            if (nw < 1e-22 * (nu + nw)) {
                img = MPoint::infinity();
            } else {
                const Quat q = (e.u * conj(e.w)) / nw;
                img = MPoint(Quat::vec(q.x, q.y, q.z));
            }
            found = true;
            break;
        }
        out.push_back(found ? img : MPoint::infinity());
    }
    return out;
}

CollapseSet collapse_set(const Cube& cube, int dir, int grid) {
    CollapseSet cs;
    cs.params = collapse_points(cube, dir, grid);
    if (!cs.params.empty()) cs.images = collapse_images(cube, dir, cs.params);
    return cs;
}

std::vector<std::vector<int>> torus_components(const std::vector<std::array<double, 2>>& pts,
                                               double spacing) {
    return adj_components(static_cast<int>(pts.size()), [&](int i, int j) {
        return torus_dist(pts[i], pts[j]) <= spacing;
    });
}

std::vector<std::vector<int>> singular_components(const std::vector<std::array<double, 2>>& pts,
                                                  const std::vector<MPoint>& imgs, int grid,
                                                  double eps_img) {
    if (pts.empty()) return {};
    const double link = 2.5 * M_PI / grid;
    auto merged = torus_components(pts, link);
    const auto D = chordal_matrix(imgs);
    const std::size_t n = imgs.size();

    // merge torus chains whose images coincide pointwise (double covers) or
    // touch (curves through a shared point)
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < merged.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < merged.size() && !changed; ++j) {
                double mind = std::numeric_limits<double>::infinity();
                for (int a : merged[i])
                    for (int b : merged[j])
                        mind = std::min(mind, D[static_cast<std::size_t>(a) * n + b]);
                if (mind < eps_img) {
                    merged[i].insert(merged[i].end(), merged[j].begin(), merged[j].end());
                    std::sort(merged[i].begin(), merged[i].end());
                    merged.erase(merged.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                }
            }
        }
    }
    return merged;
}

std::vector<std::vector<int>> merge_image_groups(const std::vector<std::vector<int>>& comps,
                                                 const std::vector<MPoint>& imgs, double eps,
                                                 double frac) {
    const auto D = chordal_matrix(imgs);
    const std::size_t n = imgs.size();
    auto near_frac = [&](const std::vector<int>& A, const std::vector<int>& B) {
        int cnt = 0;
        for (int a : A) {
            double mind = std::numeric_limits<double>::infinity();
            for (int b : B) mind = std::min(mind, D[static_cast<std::size_t>(a) * n + b]);
            if (mind < eps) ++cnt;
        }
        return static_cast<double>(cnt) / static_cast<double>(A.size());
    };

    std::vector<std::vector<int>> groups;   // component indices
    std::vector<std::vector<int>> members;  // their pooled sample indices
    for (std::size_t i = 0; i < comps.size(); ++i) {
        groups.push_back({static_cast<int>(i)});
        members.push_back(comps[i]);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < groups.size() && !changed; ++i) {
            for (std::size_t j = i + 1; j < groups.size() && !changed; ++j) {
                if (near_frac(members[i], members[j]) > frac &&
                    near_frac(members[j], members[i]) > frac) {
                    groups[i].insert(groups[i].end(), groups[j].begin(), groups[j].end());
                    members[i].insert(members[i].end(), members[j].begin(), members[j].end());
                    std::sort(members[i].begin(), members[i].end());
                    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
                    members.erase(members.begin() + static_cast<std::ptrdiff_t>(j));
                    changed = true;
                }
            }
        }
    }
    return groups;
}

void split_curves_points(const std::vector<std::vector<int>>& comps,
                         const std::vector<MPoint>& imgs,
                         std::vector<std::vector<int>>& curves,
                         std::vector<std::vector<int>>& points, int min_samples,
                         double diam) {
    curves.clear();
    points.clear();
    for (const auto& c : comps) {
        double dia = 0;
        std::vector<std::array<double, 4>> E;
        E.reserve(c.size());
        for (int k : c) E.push_back(emb_point(imgs[k]));
        for (std::size_t i = 0; i < E.size(); ++i)
            for (std::size_t j = i + 1; j < E.size(); ++j)
                dia = std::max(dia, emb_dist(E[i], E[j]));
        if (static_cast<int>(c.size()) >= min_samples && dia > diam)
            curves.push_back(c);
        else
            points.push_back(c);
    }
}

int carrier_plane(const std::vector<MPoint>& imgs, double tol) {
    double all = 0;
    std::array<double, 3> axmax{0, 0, 0};
    bool any = false;
    for (const auto& p : imgs) {
        if (p.infinite) continue;
        any = true;
        axmax[0] = std::max(axmax[0], std::abs(p.v.x));
        axmax[1] = std::max(axmax[1], std::abs(p.v.y));
        axmax[2] = std::max(axmax[2], std::abs(p.v.z));
        all = std::max({all, std::abs(p.v.x), std::abs(p.v.y), std::abs(p.v.z)});
    }
    if (!any) return -1;
    for (int ax = 0; ax < 3; ++ax)
        if (axmax[ax] < tol * std::max(1.0, all)) return ax;
    return -1;
}

std::array<int, 2> plane_vars(int axis) {
    switch (axis) {
    case 2: return {1, 2}; // z = 0: (x, y)
    case 1: return {1, 3}; // y = 0: (x, z)
    default: return {2, 3}; // x = 0: (y, z)
    }
}

std::optional<MPoint> point_slice(const Cube& cube, int dir, const RP1& par, double tol) {
    const Patch sn = slice_cube(cube, dir, par);
    static const double ths[4] = {-0.6, -0.1, 0.35, 0.8};
    std::vector<std::array<double, 4>> E;
    for (double ta : ths)
        for (double tb : ths) {
            const Hom e = slice_eval(sn, ta, tb);
            if (norm2(e.u) + norm2(e.w) < 1e-18) continue;
            E.push_back(vemb(e.u, e.w));
        }
    if (E.empty()) return std::nullopt;
    double spread = 0;
    for (const auto& e : E) spread = std::max(spread, 2.0 * emb_dist(e, E[0]));
    if (spread > tol) return std::nullopt;
    std::array<double, 4> m{0, 0, 0, 0};
    for (const auto& e : E)
        for (int c = 0; c < 4; ++c) m[c] += e[c] / static_cast<double>(E.size());
    if (m[3] > 1.0 - 1e-9) return MPoint::infinity();
    const double f = 1.0 / (1.0 - m[3]);
    return MPoint(Quat::vec(m[0] * f, m[1] * f, m[2] * f));
}

void require_nondegenerate(const Cube& cube) {
    static const double vals[4] = {0.13, 0.37, 0.62, 0.87};
    double best = 0;
    int used = 0;
    for (double s : vals)
        for (double t : vals)
            for (double u : vals) {
                try {
                    const FirstOrder fo = partials(cube, s, t, u);
                    const Quat &a = fo.dir[0], &b = fo.dir[1], &c = fo.dir[2];
                    const double la = norm(a), lb = norm(b), lc = norm(c);
                    ++used;
                    if (la * lb * lc < 1e-300) continue;
                    const double det = a.x * (b.y * c.z - b.z * c.y) -
                                       a.y * (b.x * c.z - b.z * c.x) +
                                       a.z * (b.x * c.y - b.y * c.x);
                    best = std::max(best, std::abs(det) / (la * lb * lc));
                } catch (const Error&) {
                }
            }
    if (used == 0 || best < 1e-10)
        throw DegenerateCube("jacobian vanishes across the parameter box: the net does "
                             "not parametrize a volume");
}

Eigen::VectorXd svd_nullspace(const Eigen::MatrixXd& rows, double* residual) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (residual) {
        *residual = rows.rows() >= rows.cols()
                        ? sv(sv.size() - 1) / std::max(sv(0), 1e-300)
                        : 0.0;
    }
    return svd.matrixV().col(rows.cols() - 1);
}

} // namespace dcc::detail

namespace dcc {

namespace {

using detail::emb_dist;
using detail::emb_point;

struct PlanarFit {
    std::vector<std::array<double, 2>> xy; // finite samples in plane variables
    std::vector<int> idx;                  // their sample indices
};

PlanarFit planar_coords(const std::vector<MPoint>& imgs, const std::vector<int>& sel,
                        int axis) {
    const auto vars = detail::plane_vars(axis);
    auto comp = [](const Quat& q, int c) { return c == 1 ? q.x : (c == 2 ? q.y : q.z); };
    PlanarFit out;
    for (int k : sel) {
        if (imgs[k].infinite) continue;
        out.xy.push_back({comp(imgs[k].v, vars[0]), comp(imgs[k].v, vars[1])});
        out.idx.push_back(k);
    }
    return out;
}

std::array<double, 9> bq_row(double x, double y) {
    const double r2 = x * x + y * y;
    return {r2 * r2, x * r2, y * r2, x * x, x * y, y * y, x, y, 1.0};
}

std::array<double, 6> conic_row(double x, double y) {
    return {x * x, x * y, y * y, x, y, 1.0};
}

template <std::size_t N>
double form_norm(const std::array<double, N>& c) {
    double s = 0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

// weighted SVD nullspace fit; rows damped by (1+|p|^2)^pow so near-infinity
// samples do not dominate
template <std::size_t N, class Row>
std::array<double, N> nullspace_fit(const std::vector<std::array<double, 2>>& xy, Row row,
                                    int pow, double* residual) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(xy.size()), static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < xy.size(); ++i) {
        const auto r = row(xy[i][0], xy[i][1]);
        double w = 1.0 / (1.0 + xy[i][0] * xy[i][0] + xy[i][1] * xy[i][1]);
        if (pow == 2) w *= w;
        for (std::size_t j = 0; j < N; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[j] * w;
    }
    const Eigen::VectorXd c = detail::svd_nullspace(A, residual);
    std::array<double, N> out;
    for (std::size_t j = 0; j < N; ++j) out[j] = c(static_cast<Eigen::Index>(j));
    return out;
}

// max over points of |P(p)| / ((1+|p|^2)^pow |c|): chordally weighted
template <std::size_t N, class Row>
double form_residual(const std::array<double, N>& c, Row row,
                     const std::vector<std::array<double, 2>>& xy, int pow) {
    double worst = 0;
    for (const auto& p : xy) {
        const auto r = row(p[0], p[1]);
        double v = 0;
        for (std::size_t j = 0; j < N; ++j) v += r[j] * c[j];
        double w = 1.0 + p[0] * p[0] + p[1] * p[1];
        if (pow == 2) w *= w;
        worst = std::max(worst, std::abs(v / w));
    }
    return worst / form_norm(c);
}

struct TwoLineSplit {
    std::array<double, 2> x0{};
    std::array<std::array<double, 2>, 2> dirs{};
};

// conic degenerate to two real crossing lines: |det C| ~ 0 with an indefinite
// quadratic part
std::optional<TwoLineSplit> two_line_split(const std::array<double, 6>& c6, double tol = 1e-8) {
    Eigen::Matrix3d C;
    C << c6[0], c6[1] / 2, c6[3] / 2, c6[1] / 2, c6[2], c6[4] / 2, c6[3] / 2, c6[4] / 2, c6[5];
    C /= C.cwiseAbs().maxCoeff();
    if (std::abs(C.determinant()) > tol) return std::nullopt;
    if (C.topLeftCorner<2, 2>().determinant() > -tol) return std::nullopt;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(C, Eigen::ComputeFullV);
    const Eigen::Vector3d x0h = svd.matrixV().col(2);
    if (std::abs(x0h(2)) < 1e-8) return std::nullopt;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(C.topLeftCorner<2, 2>());
    const double lam1 = eig.eigenvalues()(0), lam2 = eig.eigenvalues()(1); // lam1 < 0 < lam2
    const Eigen::Vector2d e1 = eig.eigenvectors().col(0), e2 = eig.eigenvectors().col(1);
    const Eigen::Vector2d d1 = std::sqrt(lam2) * e1 + std::sqrt(-lam1) * e2;
    const Eigen::Vector2d d2 = std::sqrt(lam2) * e1 - std::sqrt(-lam1) * e2;
    TwoLineSplit out;
    out.x0 = {x0h(0) / x0h(2), x0h(1) / x0h(2)};
    out.dirs[0] = {d1(0), d1(1)};
    out.dirs[1] = {d2(0), d2(1)};
    return out;
}

Quat plane_point(int axis, double X, double Y, double off = 0) {
    const auto vars = detail::plane_vars(axis);
    Quat q{};
    auto set = [&q](int c, double v) {
        if (c == 1)
            q.x = v;
        else if (c == 2)
            q.y = v;
        else
            q.z = v;
    };
    set(vars[0], X);
    set(vars[1], Y);
    set(axis + 1, off);
    return q;
}

struct LineFit {
    Quat center{};
    Quat dir{};
    double dev = std::numeric_limits<double>::infinity();
    int n = 0;
};

LineFit line_fit3(const std::vector<MPoint>& imgs, const std::vector<int>& sel,
                  double rmax = 10.0) {
    std::vector<Quat> P;
    for (int k : sel)
        if (!imgs[k].infinite && norm(imgs[k].v) < rmax) P.push_back(imgs[k].v);
    LineFit out;
    out.n = static_cast<int>(P.size());
    if (P.size() < 2) return out;
    Quat c{};
    for (const auto& p : P) c = c + p;
    c = c / static_cast<double>(P.size());
    Eigen::MatrixXd Qc(static_cast<Eigen::Index>(P.size()), 3);
    for (std::size_t i = 0; i < P.size(); ++i)
        Qc.row(static_cast<Eigen::Index>(i)) << P[i].x - c.x, P[i].y - c.y, P[i].z - c.z;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qc, Eigen::ComputeFullV);
    const Eigen::Vector3d v = svd.matrixV().col(0);
    double dev = 0;
    for (Eigen::Index i = 0; i < Qc.rows(); ++i) {
        const Eigen::Vector3d r = Qc.row(i).transpose();
        dev = std::max(dev, (r - v * v.dot(r)).norm());
    }
    out.center = c;
    out.dir = Quat::vec(v(0), v(1), v(2));
    out.dev = dev;
    return out;
}

// greedy nearest-neighbor chain on the parameter torus, for polyline order
std::vector<int> chain_order(const std::vector<int>& comp,
                             const std::vector<std::array<double, 2>>& pts) {
    std::vector<int> order;
    std::vector<char> used(comp.size(), 0);
    int cur = 0;
    used[0] = 1;
    order.push_back(comp[0]);
    for (std::size_t step = 1; step < comp.size(); ++step) {
        int bestj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < comp.size(); ++j) {
            if (used[j]) continue;
            const double d = detail::torus_dist(pts[comp[cur]], pts[comp[j]]);
            if (d < best) {
                best = d;
                bestj = static_cast<int>(j);
            }
        }
        used[bestj] = 1;
        order.push_back(comp[bestj]);
        cur = bestj;
    }
    return order;
}

double jac_scan(const Cube& cube, int d, const std::vector<int>& sel,
                const std::vector<std::array<double, 2>>& pts, int* samples,
                double dval = 0.37) {
    const int o0 = d == 0 ? 1 : 0;
    const int o1 = d == 2 ? 1 : 2;
    double worst = 0;
    int used = 0;
    for (int k : sel) {
        const double t0 = std::tan(pts[k][0]), t1 = std::tan(pts[k][1]);
        if (std::max(std::abs(t0), std::abs(t1)) > 20) continue;
        double pars[3];
        pars[d] = dval;
        pars[o0] = t0;
        pars[o1] = t1;
        try {
            worst = std::max(worst, std::abs(jacobian(cube, pars[0], pars[1], pars[2])));
        } catch (const Error&) {
            continue;
        }
        if (++used >= 60) break;
    }
    *samples = used;
    return worst;
}

CurveDescriptor describe_curve(const Cube& cube, int d, const std::vector<int>& comp,
                               const std::vector<std::array<double, 2>>& pts,
                               const std::vector<MPoint>& imgs,
                               const std::vector<MPoint>& pstars, int grid) {
    CurveDescriptor cd;
    cd.dir = d;

    const auto order = chain_order(comp, pts);
    cd.params.reserve(order.size());
    cd.samples.reserve(order.size());
    for (int k : order) {
        cd.params.push_back(pts[k]);
        cd.samples.push_back(imgs[k]);
    }

    // double covers: several torus chains tracing one image curve
    std::vector<std::array<double, 2>> sub;
    for (int k : comp) sub.push_back(pts[k]);
    auto chains = detail::torus_components(sub, 2.5 * M_PI / grid);
    if (chains.size() > 1) {
        for (auto& ch : chains)
            for (int& v : ch) v = comp[static_cast<std::size_t>(v)];
        const auto groups = detail::merge_image_groups(chains, imgs);
        std::size_t widest = 1;
        for (const auto& g : groups) widest = std::max(widest, g.size());
        cd.multiplicity = static_cast<int>(widest);
    }

    // fitting uses the cloud stripped of samples at point-degenerate slice
    // images (those contaminate the curves of the other directions)
    std::vector<int> fit_idx;
    for (int k : comp) {
        bool clean = true;
        for (const auto& ps : pstars)
            if (chordal(imgs[k], ps) <= 1e-6) {
                clean = false;
                break;
            }
        if (clean) fit_idx.push_back(k);
    }
    if (fit_idx.size() < 8) fit_idx = comp;

    cd.worst_jacobian = jac_scan(cube, d, fit_idx, pts, &cd.jac_samples);

    const LineFit lf = line_fit3(imgs, fit_idx);
    cd.carrier_axis = detail::carrier_plane([&] {
        std::vector<MPoint> sel;
        for (int k : fit_idx) sel.push_back(imgs[k]);
        return sel;
    }());

    if (lf.n >= 8 && lf.dev < 1e-6) {
        cd.kind = CurveKind::Line;
        cd.lines.push_back({lf.center, lf.dir});
    } else if (cd.carrier_axis >= 0) {
        const PlanarFit pf = planar_coords(imgs, fit_idx, cd.carrier_axis);
        if (pf.xy.size() >= 6) {
            double res = 0;
            const auto c6 = nullspace_fit<6>(pf.xy, conic_row, 1, &res);
            const double crel = form_residual(c6, conic_row, pf.xy, 1);
            if (crel < 1e-8) {
                cd.conic = c6;
                cd.fit_residual = crel;
                if (const auto split = two_line_split(c6)) {
                    cd.kind = CurveKind::TwoLines;
                    const Quat x0 = plane_point(cd.carrier_axis, split->x0[0], split->x0[1]);
                    for (const auto& dv : split->dirs) {
                        Quat v = plane_point(cd.carrier_axis, dv[0], dv[1]);
                        v = v / norm(v);
                        cd.lines.push_back({x0, v});
                    }
                } else {
                    cd.kind = CurveKind::Conic;
                }
            } else {
                const auto c9 = nullspace_fit<9>(pf.xy, bq_row, 2, &res);
                const double brel = form_residual(c9, bq_row, pf.xy, 2);
                cd.bq = c9;
                cd.fit_residual = brel;
                cd.kind = brel < 1e-7 ? CurveKind::BicircularQuartic : CurveKind::SpaceCurve;
            }
        } else {
            cd.kind = CurveKind::SpaceCurve;
        }
    } else {
        cd.kind = CurveKind::SpaceCurve;
    }

    // carrier slice: the sigma_d root whose degenerate sphere contains the curve
    const SigmaInfo si = sigma_info(cube, d);
    if (si.kind == SigmaInfo::Kind::Distinct || si.kind == SigmaInfo::Kind::DoubleRoot) {
        const int nroots = si.kind == SigmaInfo::Kind::DoubleRoot ? 1 : 2;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < nroots; ++r) {
            try {
                const ImplicitSurface surf = implicitize_slice(cube, d, si.roots[r]);
                double worst = 0;
                int cnt = 0;
                for (int k : fit_idx) {
                    if (imgs[k].infinite) continue;
                    worst = std::max(worst, implicit_residual(surf, imgs[k]));
                    ++cnt;
                }
                if (cnt > 0 && worst < best) {
                    best = worst;
                    cd.carrier_root = si.roots[r];
                    cd.carrier_residual = worst;
                }
            } catch (const Error&) {
            }
        }
    }
    return cd;
}

CurveDescriptor describe_cluster(int d, const std::vector<int>& comp,
                                 const std::vector<std::array<double, 2>>& pts,
                                 const std::vector<MPoint>& imgs) {
    CurveDescriptor cd;
    cd.dir = d;
    cd.kind = CurveKind::PointCluster;
    std::array<double, 4> m{0, 0, 0, 0};
    for (int k : comp) {
        cd.params.push_back(pts[k]);
        cd.samples.push_back(imgs[k]);
        const auto e = emb_point(imgs[k]);
        for (int c = 0; c < 4; ++c) m[c] += e[c] / static_cast<double>(comp.size());
    }
    cd.center = detail::emb_to_point(m);
    return cd;
}

} // namespace

SingularLocus singular_locus(const Cube& cube, int grid) {
    detail::require_nondegenerate(cube);

    // images of point-degenerate slices, for cloud stripping
    std::vector<MPoint> pstars;
    for (int d = 0; d < 3; ++d) {
        const SigmaInfo si = sigma_info(cube, d);
        if (si.kind != SigmaInfo::Kind::Distinct && si.kind != SigmaInfo::Kind::DoubleRoot)
            continue;
        const int nroots = si.kind == SigmaInfo::Kind::DoubleRoot ? 1 : 2;
        for (int r = 0; r < nroots; ++r)
            if (const auto ps = detail::point_slice(cube, d, si.roots[r])) {
                bool dup = false;
                for (const auto& q : pstars)
                    if (chordal(*ps, q) < 1e-6) {
                        dup = true;
                        break;
                    }
                if (!dup) pstars.push_back(*ps);
            }
    }

    SingularLocus out;
    for (int d = 0; d < 3; ++d) {
        const auto pts = detail::collapse_points(cube, d, grid);
        if (pts.empty()) continue;
        if (pts.size() > 20000)
            throw DegenerateCube("collapse set covers the parameter torus");
        const auto imgs = detail::collapse_images(cube, d, pts);
        const auto comps = detail::singular_components(pts, imgs, grid);
        std::vector<std::vector<int>> curves, points;
        detail::split_curves_points(comps, imgs, curves, points);
        for (const auto& comp : curves)
            out.curves.push_back(describe_curve(cube, d, comp, pts, imgs, pstars, grid));
        for (const auto& comp : points)
            out.points.push_back(describe_cluster(d, comp, pts, imgs));
    }
    return out;
}

// ---- plane curve utilities ---------------------------------------------------

namespace {

int sgn(double v) { return (v > 0) - (v < 0); }

} // namespace

int plane_curve_components(const std::function<double(double, double)>& f, double x0,
                           double x1, double y0, double y1, int n) {
    std::vector<int> S(static_cast<std::size_t>(n) * n);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = x0 + (x1 - x0) * i / (n - 1.0);
    for (int j = 0; j < n; ++j) ys[j] = y0 + (y1 - y0) * j / (n - 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S[static_cast<std::size_t>(i) * n + j] = sgn(f(xs[i], ys[j]));

    auto scell = [&](int i, int j) { return S[static_cast<std::size_t>(i) * n + j]; };
    auto hcross = [&](int i, int j) { return scell(i, j) * scell(i + 1, j) < 0; };
    auto vcross = [&](int i, int j) { return scell(i, j) * scell(i, j + 1) < 0; };
    auto hid = [&](int i, int j) { return 2 * (i * n + j); };
    auto vid = [&](int i, int j) { return 2 * (i * n + j) + 1; };

    std::map<int, int> parent;
    std::function<int(int)> find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        for (int e : {a, b})
            if (!parent.count(e)) parent[e] = e;
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[ra] = rb;
    };

    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            std::vector<int> edges;
            if (hcross(i, j)) edges.push_back(hid(i, j));
            if (hcross(i, j + 1)) edges.push_back(hid(i, j + 1));
            if (vcross(i, j)) edges.push_back(vid(i, j));
            if (vcross(i + 1, j)) edges.push_back(vid(i + 1, j));
            for (std::size_t a = 1; a < edges.size(); ++a) unite(edges[0], edges[a]);
        }

    std::vector<int> roots;
    for (const auto& [e, _] : parent) {
        const int r = find(e);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
    }
    return static_cast<int>(roots.size());
}

std::vector<std::vector<std::array<double, 2>>>
plane_curve_polylines(const std::function<double(double, double)>& f, double x0, double x1,
                      double y0, double y1, int n) {
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) xs[i] = x0 + (x1 - x0) * i / (n - 1.0);
    for (int j = 0; j < n; ++j) ys[j] = y0 + (y1 - y0) * j / (n - 1.0);
    std::vector<double> F(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) F[static_cast<std::size_t>(i) * n + j] = f(xs[i], ys[j]);
    auto val = [&](int i, int j) { return F[static_cast<std::size_t>(i) * n + j]; };

    // crossing point on the edge from grid node a to b (linear interpolation)
    auto interp = [&](int ia, int ja, int ib, int jb) -> std::array<double, 2> {
        const double va = val(ia, ja), vb = val(ib, jb);
        double t = va / (va - vb);
        if (!std::isfinite(t)) t = 0.5;
        t = std::clamp(t, 0.0, 1.0);
        return {xs[ia] + t * (xs[ib] - xs[ia]), ys[ja] + t * (ys[jb] - ys[ja])};
    };

    auto hid = [&](int i, int j) { return 2 * (i * n + j); };       // (i,j)-(i+1,j)
    auto vid = [&](int i, int j) { return 2 * (i * n + j) + 1; };   // (i,j)-(i,j+1)

    struct Seg {
        int e0, e1;
        std::array<double, 2> p0, p1;
        bool used = false;
    };
    std::vector<Seg> segs;
    std::map<int, std::vector<int>> at_edge;
    std::map<int, std::array<double, 2>> edge_pt;

    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            struct E {
                int id;
                std::array<double, 2> p;
            };
            std::vector<E> cross;
            auto consider = [&](int id, int ia, int ja, int ib, int jb) {
                if (sgn(val(ia, ja)) * sgn(val(ib, jb)) < 0) {
                    if (!edge_pt.count(id)) edge_pt[id] = interp(ia, ja, ib, jb);
                    cross.push_back({id, edge_pt[id]});
                }
            };
            consider(hid(i, j), i, j, i + 1, j);         // bottom
            consider(hid(i, j + 1), i, j + 1, i + 1, j + 1); // top
            consider(vid(i, j), i, j, i, j + 1);         // left
            consider(vid(i + 1, j), i + 1, j, i + 1, j + 1); // right
            auto add = [&](const E& a, const E& b) {
                segs.push_back({a.id, b.id, a.p, b.p, false});
                at_edge[a.id].push_back(static_cast<int>(segs.size()) - 1);
                at_edge[b.id].push_back(static_cast<int>(segs.size()) - 1);
            };
            if (cross.size() == 2) {
                add(cross[0], cross[1]);
            } else if (cross.size() == 4) {
                // saddle cell: split by the sign at the center
                const double cmid = 0.25 * (val(i, j) + val(i + 1, j) + val(i, j + 1) +
                                            val(i + 1, j + 1));
                // cross order: bottom, top, left, right
                if (sgn(cmid) == sgn(val(i, j))) {
                    add(cross[0], cross[3]); // bottom-right
                    add(cross[2], cross[1]); // left-top
                } else {
                    add(cross[0], cross[2]); // bottom-left
                    add(cross[3], cross[1]); // right-top
                }
            } else if (cross.size() == 3) {
                // grazing contact through a grid node; join the two nearest
                add(cross[0], cross[1]);
            }
        }

    std::vector<std::vector<std::array<double, 2>>> polys;
    auto walk = [&](int start, bool flip) {
        std::vector<std::array<double, 2>> line;
        const int cur = start;
        segs[cur].used = true;
        line.push_back(flip ? segs[cur].p1 : segs[cur].p0);
        line.push_back(flip ? segs[cur].p0 : segs[cur].p1);
        int exit_edge = flip ? segs[cur].e0 : segs[cur].e1;
        bool extended = true;
        while (extended) {
            extended = false;
            for (int cand : at_edge[exit_edge]) {
                if (segs[cand].used) continue;
                segs[cand].used = true;
                if (segs[cand].e0 == exit_edge) {
                    line.push_back(segs[cand].p1);
                    exit_edge = segs[cand].e1;
                } else {
                    line.push_back(segs[cand].p0);
                    exit_edge = segs[cand].e0;
                }
                extended = true;
                break;
            }
        }
        return line;
    };

    // open curves first (edges with a single incident segment), then loops
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t s = 0; s < segs.size(); ++s) {
            if (segs[s].used) continue;
            const bool open0 = at_edge[segs[s].e0].size() == 1;
            const bool open1 = at_edge[segs[s].e1].size() == 1;
            if (pass == 0 && !open0 && !open1) continue;
            polys.push_back(walk(static_cast<int>(s), pass == 0 && !open0 && open1));
        }
    return polys;
}

} // namespace dcc
