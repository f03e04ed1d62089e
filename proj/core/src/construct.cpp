#include "dcc/construct.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace dcc {

namespace {

Quat vec3(const Quat& q) { return Quat::vec(q.x, q.y, q.z); }

Quat cross3(const Quat& a, const Quat& b) {
    return Quat::vec(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x);
}

double dot3(const Quat& a, const Quat& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Hom col_times(const Hom& c, const Quat& g) { return {c.u * g, c.w * g}; }

double hom_norm(const Hom& c) { return std::sqrt(norm2(c.u) + norm2(c.w)); }

// Right factor h with col * h ~ ref, taken from the larger component.
Quat gauge_factor(const Hom& ref, const Hom& col) {
    if (norm(col.w) >= norm(col.u)) return qinv(col.w) * ref.w;
    return qinv(col.u) * ref.u;
}

double pair_mismatch(const Hom& a, const Hom& b) {
    const double s = std::max({hom_norm(a), hom_norm(b), 1e-300});
    double d = 0;
    const Quat du = a.u - b.u, dw = a.w - b.w;
    for (double v : {du.r, du.x, du.y, du.z, dw.r, dw.x, dw.y, dw.z})
        d = std::max(d, std::abs(v));
    return d / s;
}

} // namespace

Patch patch_weights_infinite(const Quat& p1q, const Quat& p2q, const Quat& p3q,
                             const Quat& v1q, const Quat& v2q, double tol) {
    const Quat p1 = vec3(p1q), p2 = vec3(p2q), p3 = vec3(p3q);
    const Quat v1 = vec3(v1q), v2 = vec3(v2q);
    const double scale = std::max({norm(p1), norm(p2), norm(p3), 1.0});
    if (norm(p2 - p1) <= tol * scale)
        throw NonCollinearInput("patch_weights_infinite: p1 and p2 coincide");
    if (norm(cross3(p2 - p1, p3 - p1)) > tol * scale * scale)
        throw NonCollinearInput("patch_weights_infinite: p1, p2, p3 are not collinear");
    if (std::abs(dot3(v1, v2)) > tol * norm(v1) * norm(v2))
        throw NonOrthogonalTangents("patch_weights_infinite: v1 and v2 are not orthogonal");

    Patch out;
    out[0] = {Quat(1), Quat()};
    out[1] = {-1.0 * (p1 * v1), -1.0 * v1};
    out[2] = {-1.0 * (p2 * v2), -1.0 * v2};
    const Quat e = (p1 - p2) * v1 * v2;
    out[3] = {p3 * e, e};
    return out;
}

Patch patch_weights_finite(const Quat& p0q, const Quat& p1q, const Quat& p2q, const Quat& p3q,
                           const Quat& v1, const Quat& v2, double tol) {
    const Quat p0 = vec3(p0q), p1 = vec3(p1q), p2 = vec3(p2q), p3 = vec3(p3q);
    Quat cr;
    try {
        cr = cross_ratio(MPoint(p0), MPoint(p1), MPoint(p3), MPoint(p2));
    } catch (const CoincidentPoints&) {
        throw NonConcyclicCorners("patch_weights_finite: coincident corners");
    }
    const double im = std::sqrt(cr.x * cr.x + cr.y * cr.y + cr.z * cr.z);
    if (im > tol * (1 + std::abs(cr.r)))
        throw NonConcyclicCorners("patch_weights_finite: corners are not concyclic");

    const Quat d1 = p1 - p0, d2 = p2 - p0, d3 = p3 - p0;
    const Quat w1 = qinv(d1) * v1;
    const Quat w2 = qinv(d2) * v2;
    const Quat w3 = qinv(d3) * (qinv(d1) - qinv(d2)) * v1 * v2;

    Patch out;
    out[0] = {p0, Quat(1)};
    out[1] = {p1 * w1, w1};
    out[2] = {p2 * w2, w2};
    out[3] = {p3 * w3, w3};
    return out;
}

std::array<Quat, 3> side_points(const Quat& p0, const Quat& p1, const Quat& p2,
                                const std::array<double, 3>& lam) {
    const Quat p[3] = {vec3(p0), vec3(p1), vec3(p2)};
    std::array<Quat, 3> q;
    for (int i = 0; i < 3; ++i)
        q[i] = (1 - lam[i]) * p[(i + 1) % 3] + lam[i] * p[(i + 2) % 3];
    return q;
}

Quat miquel_point(const Quat& p0, const Quat& p1, const Quat& p2,
                  const std::array<double, 3>& lam) {
    const Quat p[3] = {vec3(p0), vec3(p1), vec3(p2)};
    const double d[3] = {norm2(p[1] - p[2]), norm2(p[2] - p[0]), norm2(p[0] - p[1])};
    const double scale2 = std::max({d[0], d[1], d[2], 1e-300});
    if (std::min({d[0], d[1], d[2]}) <= 1e-24 * scale2)
        throw DegenerateTriangle("miquel_point: coincident vertices");

    double a[3];
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const double l = lam[i], lp = 1 - lam[i];
        a[i] = -l * lp * d[i] * d[i] + l * lam[j] * d[i] * d[j] + lp * (1 - lam[k]) * d[i] * d[k];
    }
    const double s = a[0] + a[1] + a[2];
    if (std::abs(s) <= 1e-14 * (std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2])))
        throw DegenerateTriangle("miquel_point: weights sum to zero");
    return (a[0] * p[0] + a[1] * p[1] + a[2] * p[2]) / s;
}

Hom complete_face(const Hom& c00, const Hom& c10, const Hom& c01, const MPoint& p11) {
    if (p11.infinite)
        throw IncompatibleFaces("complete_face: diagonal corner at infinity");
    const Quat g = qinv(c00.w);
    const Quat w0 = c00.w * g; // = 1
    const Quat u0 = c00.u * g;
    const Quat u1 = c10.u * g, w1 = c10.w * g;
    const Quat u2 = c01.u * g, w2 = c01.w * g;
    const Quat fp0 = u0 * qinv(w0);
    const Quat fp1 = u1 * qinv(w1);
    const Quat fp2 = u2 * qinv(w2);
    const Quat e1 = fp1 - fp0, e2 = fp2 - fp0;
    const Quat v1 = e1 * w1, v2 = e2 * w2;
    const Quat w11 = qinv(p11.v - fp0) * (qinv(e1) - qinv(e2)) * (v1 * v2);
    const Quat u11 = p11.v * w11;
    return {u11 * c00.w, w11 * c00.w};
}

namespace {

struct FaceSet {
    Patch st, su, tu;
};

Cube complete_cube_impl(const FaceSet& f, int depth);

// Shared columns after gauging must agree as homogeneous pairs.
void require_pair(const Hom& a, const Hom& b, const char* what) {
    if (pair_mismatch(a, b) > 1e-7)
        throw IncompatibleFaces(std::string("complete_cube: faces disagree on ") + what);
}

Cube complete_by_inversion(const FaceSet& f, int depth) {
    if (depth > 0)
        throw IncompatibleFaces("complete_cube: could not move corners away from infinity");
    const double base[4][3] = {
        {0.31, -0.72, 0.55}, {0.51, 0.62, -0.35}, {-0.82, 0.11, 0.43}, {1.37, 0.29, 0.91}};
    for (const auto& b : base) {
        const Quat c = Quat::vec(b[0], b[1], b[2]);
        bool good = true;
        for (const Patch* p : {&f.st, &f.su, &f.tu}) {
            for (const Hom& col : p->c) {
                MPoint pt;
                try {
                    pt = proj_div(col);
                } catch (const ZeroPair&) {
                    throw IncompatibleFaces("complete_cube: base column in a face");
                }
                if (!pt.infinite && norm(pt.v - c) < 0.05 * (1 + norm(pt.v))) good = false;
            }
        }
        if (!good) continue;
        FaceSet g{apply_inversion_to_net(f.st, c, 1.0), apply_inversion_to_net(f.su, c, 1.0),
                  apply_inversion_to_net(f.tu, c, 1.0)};
        Cube cube = complete_cube_impl(g, depth + 1);
        return apply_inversion_to_net(cube, c, 1.0);
    }
    throw IncompatibleFaces("complete_cube: no usable inversion center");
}

Cube complete_cube_impl(const FaceSet& f, int depth) {
    const Patch& f_st = f.st;
    auto point_of = [](const Hom& c) {
        try {
            return proj_div(c);
        } catch (const ZeroPair&) {
            throw IncompatibleFaces("complete_cube: base column in a face");
        }
    };

    // corner agreement between faces
    const struct {
        const Hom *a, *b;
        const char* what;
    } shared[] = {
        {&f.st[0], &f.su[0], "corner 0 (st/su)"}, {&f.st[0], &f.tu[0], "corner 0 (st/tu)"},
        {&f.st[1], &f.su[1], "corner 1"},         {&f.st[2], &f.tu[1], "corner 2"},
        {&f.su[2], &f.tu[2], "corner 4"},
    };
    for (const auto& s : shared)
        if (chordal(point_of(*s.a), point_of(*s.b)) > 1e-7)
            throw IncompatibleFaces(std::string("complete_cube: faces disagree at ") + s.what);

    // bounding-box diagonal of the finite corner points
    double lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    bool first = true;
    for (const Patch* p : {&f.st, &f.su, &f.tu}) {
        for (const Hom& col : p->c) {
            const MPoint pt = point_of(col);
            if (pt.infinite) continue;
            const double crd[3] = {pt.v.x, pt.v.y, pt.v.z};
            for (int i = 0; i < 3; ++i) {
                lo[i] = first ? crd[i] : std::min(lo[i], crd[i]);
                hi[i] = first ? crd[i] : std::max(hi[i], crd[i]);
            }
            first = false;
        }
    }
    const double diag = first ? 1.0
                              : std::max(std::hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]),
                                         1e-12);

    // Farin points of the shared edges must agree: same circular arc, same
    // parametrization.
    const struct {
        const Hom *a0, *a1, *b0, *b1;
        const char* what;
    } edges[] = {
        {&f.st[0], &f.st[1], &f.su[0], &f.su[1], "edge 0-1"},
        {&f.st[0], &f.st[2], &f.tu[0], &f.tu[1], "edge 0-2"},
        {&f.su[0], &f.su[2], &f.tu[0], &f.tu[2], "edge 0-4"},
    };
    for (const auto& e : edges) {
        MPoint fa, fb;
        try {
            fa = farin_point(*e.a0, *e.a1);
            fb = farin_point(*e.b0, *e.b1);
        } catch (const DegenerateArc&) {
            continue; // coincident edge corners: no arc to compare
        }
        const bool ok = (!fa.infinite && !fb.infinite) ? norm(fa.v - fb.v) <= 1e-8 * diag
                                                       : chordal(fa, fb) <= 1e-8;
        if (!ok)
            throw IncompatibleFaces(
                std::string("complete_cube: Farin points disagree on ") + e.what);
    }

    // gauge su and tu onto st through the shared corner 0
    const Patch su = [&] {
        Patch p = f.su;
        const Quat h = gauge_factor(f_st[0], f.su[0]);
        for (Hom& c : p.c) c = col_times(c, h);
        return p;
    }();
    const Patch tu = [&] {
        Patch p = f.tu;
        const Quat h = gauge_factor(f_st[0], f.tu[0]);
        for (Hom& c : p.c) c = col_times(c, h);
        return p;
    }();
    require_pair(su[0], f_st[0], "corner 0 column (st/su)");
    require_pair(tu[0], f_st[0], "corner 0 column (st/tu)");
    require_pair(su[1], f_st[1], "corner 1 column");
    require_pair(tu[1], f_st[2], "corner 2 column");
    require_pair(tu[2], su[2], "corner 4 column");

    Cube cube;
    cube[0] = f_st[0];
    cube[1] = f_st[1];
    cube[2] = f_st[2];
    cube[3] = f_st[3];
    cube[4] = su[2];
    cube[5] = su[3];
    cube[6] = tu[3];

    MPoint pt[7];
    for (int n = 0; n < 7; ++n) pt[n] = point_of(cube[static_cast<std::size_t>(n)]);
    bool inf_rest = false;
    for (int n = 1; n < 7; ++n) inf_rest |= pt[n].infinite;
    if (inf_rest) return complete_by_inversion(f, depth);

    // Miquel point of the triangle obtained by inverting at corner 0.
    Quat T[3], q[3];
    if (pt[0].infinite) {
        T[0] = pt[1].v;
        T[1] = pt[2].v;
        T[2] = pt[4].v;
        q[0] = pt[6].v;
        q[1] = pt[5].v;
        q[2] = pt[3].v;
    } else {
        const auto inv = [&](const MPoint& p) {
            const MPoint r = sphere_inversion(pt[0].v, 1.0, p);
            if (r.infinite)
                throw DegenerateTriangle("complete_cube: corner coincides with corner 0");
            return r.v;
        };
        T[0] = inv(pt[1]);
        T[1] = inv(pt[2]);
        T[2] = inv(pt[4]);
        q[0] = inv(pt[6]);
        q[1] = inv(pt[5]);
        q[2] = inv(pt[3]);
    }

    // side ratios: q_i = (1 - l_i) T_j + l_i T_k on the triangle sides
    std::array<double, 3> lam{};
    double tscale = 0;
    for (int i = 0; i < 3; ++i) tscale = std::max(tscale, norm(T[i]));
    for (int i = 0; i < 3; ++i) {
        const Quat& tj = T[(i + 1) % 3];
        const Quat& tk = T[(i + 2) % 3];
        const Quat e = tk - tj;
        const double n2 = norm2(e);
        if (n2 <= 1e-24 * tscale * tscale)
            throw DegenerateTriangle("complete_cube: inverted triangle degenerates");
        lam[i] = dot3(q[i] - tj, e) / n2;
        const Quat res = q[i] - ((1 - lam[i]) * tj + lam[i] * tk);
        if (norm(res) > 1e-6 * (1 + tscale))
            throw IncompatibleFaces(
                "complete_cube: interior face corners do not lie on the triangle sides");
    }

    const Quat M = miquel_point(T[0], T[1], T[2], lam);
    const MPoint p7 = pt[0].infinite ? MPoint(M) : sphere_inversion(pt[0].v, 1.0, MPoint(M));
    if (p7.infinite) return complete_by_inversion(f, depth);

    // column 7 from the three faces that contain it
    const struct {
        std::size_t a, b, c;
    } faces[] = {{1, 3, 5}, {2, 3, 6}, {4, 5, 6}};
    std::vector<Hom> cands;
    for (const auto& fc : faces) {
        const MPoint pa = pt[fc.a], pb = pt[fc.b], pc = pt[fc.c];
        const double sep = std::min({chordal(pa, pb), chordal(pa, pc), chordal(pb, pc),
                                     chordal(pa, p7), chordal(pb, p7), chordal(pc, p7)});
        if (sep < 1e-9) continue; // coincident corners: completion undefined
        cands.push_back(complete_face(cube[fc.a], cube[fc.b], cube[fc.c], p7));
    }
    if (cands.empty())
        throw IncompatibleFaces("complete_cube: every face at the last corner is degenerate");
    for (Hom& c : cands) {
        const double n = hom_norm(c);
        if (n < 1e-300) throw IncompatibleFaces("complete_cube: zero completion column");
        c = {c.u / n, c.w / n};
    }
    for (std::size_t i = 1; i < cands.size(); ++i) {
        const Hom& a = cands[0];
        const Hom& b = cands[i];
        const Hom neg{-1.0 * b.u, -1.0 * b.w};
        if (std::min(pair_mismatch(a, b), pair_mismatch(a, neg)) > 1e-7)
            throw IncompatibleFaces("complete_cube: face completions disagree");
    }
    cube[7] = cands[0];
    return cube;
}

} // namespace

Cube complete_cube(const Patch& f_st, const Patch& f_su, const Patch& f_tu) {
    bool anyinf = false;
    for (const Patch* p : {&f_st, &f_su, &f_tu}) {
        for (const Hom& col : p->c) {
            try {
                anyinf |= proj_div(col).infinite;
            } catch (const ZeroPair&) {
                throw IncompatibleFaces("complete_cube: base column in a face");
            }
        }
    }
    FaceSet f{f_st, f_su, f_tu};
    // corner 0 at infinity is handled directly; anything else infinite is
    // moved by a preliminary inversion
    if (anyinf) {
        try {
            const MPoint p0 = proj_div(f_st[0]);
            bool rest_inf = false;
            for (const Patch* p : {&f_st, &f_su, &f_tu})
                for (std::size_t i = 1; i < 4; ++i) rest_inf |= proj_div((*p)[i]).infinite;
            if (!p0.infinite || rest_inf) return complete_by_inversion(f, 0);
        } catch (const ZeroPair&) {
            throw IncompatibleFaces("complete_cube: base column in a face");
        }
    }
    return complete_cube_impl(f, 0);
}

Quat patch_normal(const Patch& patch) {
    try {
        const PatchFirstOrder fo = partials(patch, 0, 0);
        const Quat n = cross3(fo.dir[0], fo.dir[1]);
        if (norm(n) > 1e-9 * (norm(fo.dir[0]) * norm(fo.dir[1]) + 1e-300)) return n / norm(n);
    } catch (const PoleEncountered&) {
    }
    // corner degenerate: take the normal at an interior point and transport
    // it back through the weight gauge, n(s,t) = W n0 W^{-1} up to scale
    const double s0 = 0.37, t0 = 0.41;
    const PatchFirstOrder fo = partials(patch, s0, t0);
    Quat n = cross3(fo.dir[0], fo.dir[1]);
    if (norm(n) < 1e-12) throw InvalidParameter("patch_normal: normal undefined");
    n = n / norm(n);
    const Quat W = eval_hom(patch, RP1(s0), RP1(t0)).w;
    Quat n0 = qinv(W) * n * W;
    n0 = Quat::vec(n0.x, n0.y, n0.z);
    if (norm(n0) < 1e-12) throw InvalidParameter("patch_normal: normal undefined");
    return n0 / norm(n0);
}

Cube offset_cube(const Patch& patch, const Quat& n0q, double d) {
    if (d == 0.0) throw InvalidParameter("offset_cube: distance must be nonzero");
    Quat n0 = Quat::vec(n0q.x, n0q.y, n0q.z);
    const double nn = norm(n0);
    if (nn == 0.0) throw InvalidParameter("offset_cube: zero normal");
    n0 = n0 / nn;
    Cube out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = patch[i];
        out[i + 4] = {patch[i].u - d * (patch[i].w * n0), patch[i].w};
    }
    return out;
}

Cube offset_cube(const Patch& patch, double d) { return offset_cube(patch, patch_normal(patch), d); }

Cube axial_cube(const Patch& patch, const Quat& axisq) {
    Quat axis = Quat::vec(axisq.x, axisq.y, axisq.z);
    const double nn = norm(axis);
    if (nn == 0.0) throw InvalidParameter("axial_cube: zero axis");
    axis = axis / nn;
    Cube out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i] = patch[i];
        out[i + 4] = {axis * patch[i].u, axis * patch[i].w};
    }
    return out;
}

} // namespace dcc
