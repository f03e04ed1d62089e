#include "dcc/qb.hpp"

#include "dcc/quat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

namespace dcc {

namespace {

double hom_scale(const Hom& c) {
    double m = 0;
    for (double v : {c.u.r, c.u.x, c.u.y, c.u.z, c.w.r, c.w.x, c.w.y, c.w.z})
        m = std::max(m, std::abs(v));
    return m;
}

Hom lincomb(double a, const Hom& A, double b, const Hom& B) {
    return {a * A.u + b * B.u, a * A.w + b * B.w};
}

} // namespace

double net_scale(const Cube& cube) {
    double m = 0;
    for (const Hom& c : cube.c) m = std::max(m, hom_scale(c));
    return m;
}

double net_scale(const Patch& patch) {
    double m = 0;
    for (const Hom& c : patch.c) m = std::max(m, hom_scale(c));
    return m;
}

MPoint proj_div(const Quat& u, const Quat& w, double tol) {
    const double nu = norm(u), nw = norm(w);
    const double s = nu + nw;
    if (s == 0.0) throw ZeroPair("proj_div: both arguments vanish");
    if (nw <= tol * s) return MPoint::infinity();
    return MPoint(u * qinv(w));
}

MPoint proj_div(const Hom& c, double tol) { return proj_div(c.u, c.w, tol); }

std::array<double, 2> bern_weights(const RP1& t, bool normalized) {
    double n = t.num, d = t.den;
    if (normalized) {
        const double h = std::hypot(n, d);
        n /= h;
        d /= h;
    }
    return {d - n, n};
}

Hom eval_hom(const Cube& cube, const RP1& s, const RP1& t, const RP1& u) {
    const auto Bs = bern_weights(s, true);
    const auto Bt = bern_weights(t, true);
    const auto Bu = bern_weights(u, true);
    Hom out;
    for (std::size_t n = 0; n < 8; ++n) {
        const double w = Bs[n & 1] * Bt[(n >> 1) & 1] * Bu[(n >> 2) & 1];
        out.u += w * cube[n].u;
        out.w += w * cube[n].w;
    }
    return out;
}

Hom eval_hom(const Patch& patch, const RP1& s, const RP1& t) {
    const auto Bs = bern_weights(s, true);
    const auto Bt = bern_weights(t, true);
    Hom out;
    for (std::size_t n = 0; n < 4; ++n) {
        const double w = Bs[n & 1] * Bt[(n >> 1) & 1];
        out.u += w * patch[n].u;
        out.w += w * patch[n].w;
    }
    return out;
}

MPoint eval_cube(const Cube& cube, const RP1& s, const RP1& t, const RP1& u) {
    const Hom e = eval_hom(cube, s, t, u);
    const double scale = net_scale(cube);
    if (norm(e.u) + norm(e.w) < 1e-9 * scale)
        throw IndeterminatePoint("eval_cube: base point");
    return proj_div(e);
}

MPoint eval_patch(const Patch& patch, const RP1& s, const RP1& t) {
    const Hom e = eval_hom(patch, s, t);
    const double scale = net_scale(patch);
    if (norm(e.u) + norm(e.w) < 1e-9 * scale)
        throw IndeterminatePoint("eval_patch: base point");
    return proj_div(e);
}

FirstOrder partials(const Cube& cube, double s, double t, double u) {
    const double B[3][2] = {{1 - s, s}, {1 - t, t}, {1 - u, u}};
    Hom E;
    for (std::size_t n = 0; n < 8; ++n) {
        const double w = B[0][n & 1] * B[1][(n >> 1) & 1] * B[2][(n >> 2) & 1];
        E.u += w * cube[n].u;
        E.w += w * cube[n].w;
    }
    const double scale = net_scale(cube);
    if (norm(E.w) < 1e-12 * std::max(scale, 1.0))
        throw PoleEncountered("partials: value at infinity");
    const Quat Winv = qinv(E.w);
    const Quat F = E.u * Winv;

    FirstOrder out;
    out.value = MPoint(F);
    for (int d = 0; d < 3; ++d) {
        const int bit = 1 << d;
        Hom diff;
        for (std::size_t n = 0; n < 8; ++n) {
            if (n & bit) continue; // difference columns indexed by the lower corner
            double w = 1;
            for (int e = 0; e < 3; ++e)
                if (e != d) w *= B[e][(n >> e) & 1];
            diff.u += w * (cube[n + bit].u - cube[n].u);
            diff.w += w * (cube[n + bit].w - cube[n].w);
        }
        out.dir[d] = (diff.u - F * diff.w) * Winv;
    }
    return out;
}

PatchFirstOrder partials(const Patch& patch, double s, double t) {
    const double B[2][2] = {{1 - s, s}, {1 - t, t}};
    Hom E;
    for (std::size_t n = 0; n < 4; ++n) {
        const double w = B[0][n & 1] * B[1][(n >> 1) & 1];
        E.u += w * patch[n].u;
        E.w += w * patch[n].w;
    }
    const double scale = net_scale(patch);
    if (norm(E.w) < 1e-12 * std::max(scale, 1.0))
        throw PoleEncountered("partials: value at infinity");
    const Quat Winv = qinv(E.w);
    const Quat F = E.u * Winv;

    PatchFirstOrder out;
    out.value = MPoint(F);
    for (int d = 0; d < 2; ++d) {
        const int bit = 1 << d;
        Hom diff;
        for (std::size_t n = 0; n < 4; ++n) {
            if (n & bit) continue;
            const int e = 1 - d;
            const double w = B[e][(n >> e) & 1];
            diff.u += w * (patch[n + bit].u - patch[n].u);
            diff.w += w * (patch[n + bit].w - patch[n].w);
        }
        out.dir[d] = (diff.u - F * diff.w) * Winv;
    }
    return out;
}

double jacobian(const Cube& cube, double s, double t, double u) {
    const FirstOrder fo = partials(cube, s, t, u);
    const Quat& a = fo.dir[0];
    const Quat& b = fo.dir[1];
    const Quat& c = fo.dir[2];
    return a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) +
           a.z * (b.x * c.y - b.y * c.x);
}

MPoint farin_point(const Hom& a, const Hom& b, double tol) {
    MPoint pa, pb;
    try {
        pa = proj_div(a);
        pb = proj_div(b);
    } catch (const ZeroPair&) {
        throw DegenerateArc("farin_point: endpoint is a base column");
    }
    if (chordal(pa, pb) < tol) throw DegenerateArc("farin_point: endpoints coincide");
    try {
        return proj_div(a.u + b.u, a.w + b.w);
    } catch (const ZeroPair&) {
        throw DegenerateArc("farin_point: columns are opposite representatives");
    }
}

Cube reparametrize_interior(const Cube& cube, double l1, double l2, double l3) {
    if (l1 == 0.0 || l2 == 0.0 || l3 == 0.0)
        throw ZeroMultiplier("reparametrize_interior: zero multiplier");
    const double l[3] = {l1, l2, l3};
    Cube out;
    for (std::size_t n = 0; n < 8; ++n) {
        double m = 1;
        for (int d = 0; d < 3; ++d)
            if (n & (1u << d)) m *= l[d];
        out[n] = {m * cube[n].u, m * cube[n].w};
    }
    return out;
}

namespace {

template <typename Net> Net translate_net(const Net& net, const Quat& a) {
    Net out = net;
    for (Hom& c : out.c) c.u = c.u + a * c.w;
    return out;
}

template <typename Net> Net scale_net(const Net& net, double lambda) {
    Net out = net;
    for (Hom& c : out.c) c.u = lambda * c.u;
    return out;
}

template <typename Net> Net rotate_net(const Net& net, const Quat& r0) {
    const Quat r = r0 / norm(r0);
    Net out = net;
    for (Hom& c : out.c) {
        c.u = r * c.u;
        c.w = r * c.w;
    }
    return out;
}

template <typename Net> Net invert_net(const Net& net, const Quat& q, double r2) {
    const Quat qi = Quat::vec(q.x, q.y, q.z);
    const double k = norm2(qi) - r2;
    Net out = net;
    for (Hom& c : out.c) {
        const Quat u2 = qi * c.u + k * c.w;
        const Quat w2 = c.u - qi * c.w;
        c.u = u2;
        c.w = w2;
    }
    return out;
}

} // namespace

Cube net_translate(const Cube& cube, const Quat& a) { return translate_net(cube, a); }
Cube net_scale_by(const Cube& cube, double lambda) { return scale_net(cube, lambda); }
Cube net_rotate(const Cube& cube, const Quat& r) { return rotate_net(cube, r); }
Cube apply_inversion_to_net(const Cube& cube, const Quat& q, double r2) {
    return invert_net(cube, q, r2);
}
Patch net_translate(const Patch& patch, const Quat& a) { return translate_net(patch, a); }
Patch net_scale_by(const Patch& patch, double lambda) { return scale_net(patch, lambda); }
Patch net_rotate(const Patch& patch, const Quat& r) { return rotate_net(patch, r); }
Patch apply_inversion_to_net(const Patch& patch, const Quat& q, double r2) {
    return invert_net(patch, q, r2);
}

Cube apply_mobius_to_net(const MobiusMap& m, const Cube& cube) {
    Cube cur = cube;
    for (const MobiusMap::Step& st : m.steps()) {
        cur = std::visit(
            [&cur](const auto& s) -> Cube {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, MobiusMap::Translation>)
                    return net_translate(cur, s.a);
                else if constexpr (std::is_same_v<T, MobiusMap::Homothety>)
                    return net_scale_by(cur, s.lambda);
                else if constexpr (std::is_same_v<T, MobiusMap::UnitInversion>)
                    return apply_inversion_to_net(cur, Quat{}, 1.0);
                else if constexpr (std::is_same_v<T, MobiusMap::Rotation>)
                    return net_rotate(cur, s.r);
                else
                    return apply_inversion_to_net(cur, s.q, s.r2);
            },
            st);
    }
    return cur;
}

Patch slice_cube(const Cube& cube, int dir, const RP1& par) {
    const auto B = bern_weights(par, false);
    int d1 = -1, d2 = -1;
    for (int d = 0; d < 3; ++d) {
        if (d == dir) continue;
        (d1 < 0 ? d1 : d2) = d;
    }
    Patch out;
    static constexpr int corners[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    for (int m = 0; m < 4; ++m) {
        const std::size_t n0 = (static_cast<std::size_t>(corners[m][0]) << d1) |
                               (static_cast<std::size_t>(corners[m][1]) << d2);
        out[static_cast<std::size_t>(corners[m][0] + 2 * corners[m][1])] =
            lincomb(B[0], cube[n0], B[1], cube[n0 + (1u << dir)]);
    }
    return out;
}

std::array<double, 3> sigma_poly(const Cube& cube, int dir, int pair) {
    const int pa = (pair == 0) ? 0 : 1;
    const int pb = (pair == 0) ? 3 : 2;
    const auto sig = [&](const RP1& par) {
        const Patch P = slice_cube(cube, dir, par);
        return dot(P[pa].u, P[pb].w) + dot(P[pb].u, P[pa].w);
    };
    const double c0 = sig(RP1(0, 1));
    const double c2 = sig(RP1(1, 0));
    const double c1 = sig(RP1(1, 1)) - c0 - c2;
    return {c0, c1, c2};
}

std::array<std::array<double, 3>, 3> spherical_polys(const Cube& cube) {
    return {sigma_poly(cube, 0), sigma_poly(cube, 1), sigma_poly(cube, 2)};
}

SigmaInfo sigma_info(const Cube& cube, int dir) {
    SigmaInfo info;
    info.c = sigma_poly(cube, dir);
    const double scale = std::max(net_scale(cube), 1.0);
    const double cn =
        std::sqrt(info.c[0] * info.c[0] + info.c[1] * info.c[1] + info.c[2] * info.c[2]);
    info.disc = info.c[1] * info.c[1] - 4 * info.c[0] * info.c[2];
    if (cn < 1e-10 * scale * scale) {
        info.kind = SigmaInfo::Kind::Zero;
        return info;
    }
    if (info.disc < -1e-9 * cn * cn)
        info.kind = SigmaInfo::Kind::Complex;
    else if (std::abs(info.disc) <= 1e-9 * cn * cn)
        info.kind = SigmaInfo::Kind::DoubleRoot;
    else
        info.kind = SigmaInfo::Kind::Distinct;

    const double c0 = info.c[0], c1 = info.c[1], c2 = info.c[2];
    if (std::abs(c2) < 1e-12 * cn) {
        info.roots[0] = RP1::infinity();
        info.roots[1] = (std::abs(c1) > 1e-12 * cn) ? RP1(-c0 / c1) : RP1::infinity();
    } else if (info.kind == SigmaInfo::Kind::Complex) {
        info.roots[0] = info.roots[1] = RP1(-c1 / (2 * c2));
    } else {
        const double sq = std::sqrt(std::max(info.disc, 0.0));
        info.roots[0] = RP1((-c1 + sq) / (2 * c2));
        info.roots[1] = RP1((-c1 - sq) / (2 * c2));
    }
    return info;
}

std::array<double, 4> sphere_embedding(const Hom& c) {
    const double nu = norm2(c.u), nw = norm2(c.w);
    const double den = nu + nw;
    if (den == 0.0) throw ZeroPair("sphere_embedding: zero column");
    const Quat q = c.u * conj(c.w);
    return {2 * q.x / den, 2 * q.y / den, 2 * q.z / den, (nu - nw) / den};
}

SliceKind slice_kind(const Cube& cube, int dir, const RP1& par, double tol) {
    const Patch P = slice_cube(cube, dir, par);
    const double scale = std::max(net_scale(P), 1e-300);

    std::vector<std::array<double, 4>> embs;
    const RP1 params[5] = {RP1(0.0), RP1(1.0 / 3.0), RP1(2.0 / 3.0), RP1(1.0), RP1::infinity()};
    for (const RP1& s : params) {
        for (const RP1& t : params) {
            const Hom e = eval_hom(P, s, t);
            if (norm(e.u) + norm(e.w) < 1e-12 * scale) continue; // base point
            embs.push_back(sphere_embedding(e));
        }
    }
    if (embs.size() < 4) return SliceKind::Point;

    Eigen::MatrixXd M(static_cast<Eigen::Index>(embs.size()), 4);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = embs[static_cast<std::size_t>(i)][j];
    const Eigen::RowVector4d mean = M.colwise().mean();
    M.rowwise() -= mean;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    if (sv(0) < tol) return SliceKind::Point;
    if (sv(2) <= tol * sv(0)) return SliceKind::Circle;
    return SliceKind::Sphere;
}

} // namespace dcc
