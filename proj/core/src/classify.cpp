#include "dcc/analysis.hpp"

#include "dcc/errors.hpp"
#include "internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace dcc {

namespace {

// probe parameters spread over the affine patch square and beyond
constexpr std::array<std::array<double, 2>, 6> kSlicePars{
    {{0.0, 0.0}, {1.4, 0.0}, {0.0, 1.4}, {1.4, 1.4}, {0.6, 0.6}, {-0.8, 0.45}}};

struct Spread {
    double value = std::numeric_limits<double>::infinity();
    std::array<double, 4> mean{};
    bool valid = false;
};

// embedded diameter of sample points of the dir-slice at angle th
Spread slice_spread(const Cube& cube, int dir, double th, double scale2) {
    const Patch sn = slice_cube(cube, dir, RP1(std::sin(th), std::cos(th)));
    std::vector<std::array<double, 4>> E;
    for (const auto& [ta, tb] : kSlicePars) {
        const Hom e = detail::slice_eval(sn, ta, tb);
        if (norm2(e.u) + norm2(e.w) < 1e-26 * scale2) continue;
        E.push_back(detail::vemb(e.u, e.w));
    }
    Spread out;
    if (E.size() < 3) return out;
    double spread = 0;
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = i + 1; j < E.size(); ++j)
            spread = std::max(spread, 2.0 * detail::emb_dist(E[i], E[j]));
    out.value = 0.5 * spread;
    for (const auto& e : E)
        for (int c = 0; c < 4; ++c) out.mean[c] += e[c] / static_cast<double>(E.size());
    out.valid = true;
    return out;
}

// collapse residual of the dd-curve of a 2x2 patch at angle th
Spread patch_spread(const Patch& patch, int dd, double th) {
    static const double others[3] = {0.0, M_PI / 2, M_PI / 4};
    std::vector<std::array<double, 4>> E;
    for (double other : others) {
        const double tha = dd == 0 ? th : other;
        const double thb = dd == 0 ? other : th;
        const Hom e = detail::slice_eval(patch, tha, thb);
        if (norm2(e.u) + norm2(e.w) < 1e-26) continue;
        E.push_back(detail::vemb(e.u, e.w));
    }
    Spread out;
    if (E.size() < 3) return out;
    double spread = 0;
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = i + 1; j < E.size(); ++j)
            spread = std::max(spread, 2.0 * detail::emb_dist(E[i], E[j]));
    out.value = 0.5 * spread;
    for (const auto& e : E)
        for (int c = 0; c < 4; ++c) out.mean[c] += e[c] / static_cast<double>(E.size());
    out.valid = true;
    return out;
}

constexpr int kScan = 720;

// local minima of the spread scan refined by ternary search
template <class SpreadFn>
std::vector<std::pair<double, std::array<double, 4>>> spread_minima(SpreadFn&& fn,
                                                                    double tol) {
    std::vector<double> sp(kScan);
    std::vector<double> th(kScan);
    for (int i = 0; i < kScan; ++i) {
        th[i] = -M_PI / 2 + i * M_PI / kScan;
        sp[i] = fn(th[i]).value;
    }
    std::vector<std::pair<double, std::array<double, 4>>> found;
    for (int i = 0; i < kScan; ++i) {
        const double prev = sp[(i + kScan - 1) % kScan];
        const double next = sp[(i + 1) % kScan];
        if (sp[i] > 0.3 || sp[i] > prev || sp[i] > next) continue;
        double lo = th[i] - M_PI / kScan, hi = th[i] + M_PI / kScan;
        for (int it = 0; it < 60; ++it) {
            const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (fn(m1).value < fn(m2).value)
                hi = m2;
            else
                lo = m1;
        }
        const double t0 = 0.5 * (lo + hi);
        const Spread s0 = fn(t0);
        if (s0.valid && s0.value < tol) found.push_back({t0, s0.mean});
    }
    return found;
}

// parameters (angles) where the dir-slice of the cube is a single point
std::vector<std::pair<double, MPoint>> point_slices(const Cube& cube, int dir,
                                                    double tol = 1e-7) {
    const double scale2 = detail::net_scale2(cube);
    const auto found =
        spread_minima([&](double t) { return slice_spread(cube, dir, t, scale2); }, tol);
    std::vector<std::pair<double, MPoint>> out;
    for (const auto& [t0, e0] : found) {
        bool fresh = true;
        for (const auto& [t1, p1] : out)
            if (std::abs(std::sin(t0 - t1)) <= 1e-3) {
                fresh = false;
                break;
            }
        if (fresh) out.push_back({t0, detail::emb_to_point(e0)});
    }
    return out;
}

// distinct images of collapsed coordinate circles of a planar patch
std::vector<MPoint> patch_poles(const Patch& patch, double tol = 1e-7) {
    std::vector<MPoint> poles;
    for (int dd = 0; dd < 2; ++dd) {
        const auto found =
            spread_minima([&](double t) { return patch_spread(patch, dd, t); }, tol);
        for (const auto& [t0, e0] : found) {
            const MPoint p = detail::emb_to_point(e0);
            bool fresh = true;
            for (const auto& q : poles)
                if (chordal(p, q) <= 1e-4) {
                    fresh = false;
                    break;
                }
            if (fresh) poles.push_back(p);
        }
    }
    return poles;
}

// number of singular-curve components per direction
std::array<int, 3> curve_counts(const Cube& cube) {
    std::array<int, 3> out{0, 0, 0};
    for (int d = 0; d < 3; ++d) {
        const auto pts = detail::collapse_points(cube, d);
        if (pts.empty()) continue;
        const auto imgs = detail::collapse_images(cube, d, pts);
        const auto comps = detail::singular_components(pts, imgs);
        std::vector<std::vector<int>> curves, points;
        detail::split_curves_points(comps, imgs, curves, points);
        out[d] = static_cast<int>(curves.size());
    }
    return out;
}

} // namespace

Classification classify(const Cube& cube) {
    detail::require_nondegenerate(cube);

    Classification cl;
    for (int d = 0; d < 3; ++d) cl.sigma[d] = sigma_info(cube, d);
    auto kind = [&](int d) { return cl.sigma[d].kind; };
    auto done = [&](Subtype s) {
        cl.subtype = s;
        cl.coarse = coarse_of(s);
        return cl;
    };

    // spherical: a direction whose spheres all degenerate
    std::vector<int> zero_dirs;
    for (int d = 0; d < 3; ++d)
        if (kind(d) == SigmaInfo::Kind::Zero) zero_dirs.push_back(d);
    if (!zero_dirs.empty()) {
        int best = 0;
        for (int d : zero_dirs)
            best = std::max(best, static_cast<int>(point_slices(cube, d).size()));
        if (best >= 2) return done(Subtype::S1); // concentric spheres
        if (best == 1) return done(Subtype::S2); // parallel planes
        // axial pencil: pole count of a generic planar slice
        const int d3 = zero_dirs[0];
        const Patch patch = slice_cube(cube, d3, RP1(std::sin(0.41), std::cos(0.41)));
        return done(patch_poles(patch).size() >= 2 ? Subtype::S3 : Subtype::S4);
    }

    // offset: a double sigma root whose slice degenerates to a point.  The
    // subtype counts the directions whose singular curves pass through the
    // degenerate point; point-like clusters at the point itself do not count.
    const double scale2 = detail::net_scale2(cube);
    for (int d = 0; d < 3; ++d) {
        if (kind(d) != SigmaInfo::Kind::DoubleRoot) continue;
        const RP1 par = cl.sigma[d].roots[0];
        const Spread sp = slice_spread(cube, d, std::atan2(par.num, par.den), scale2);
        if (!(sp.valid && sp.value < 1e-7)) continue;
        const MPoint pstar = detail::emb_to_point(sp.mean);
        int near = 0;
        for (int dd = 0; dd < 3; ++dd) {
            if (dd == d) continue;
            const auto pts = detail::collapse_points(cube, dd);
            if (pts.empty()) continue;
            const auto imgs = detail::collapse_images(cube, dd, pts);
            const auto comps = detail::singular_components(pts, imgs);
            std::vector<std::vector<int>> curves, points;
            detail::split_curves_points(comps, imgs, curves, points);
            bool hit = false;
            for (const auto& comp : curves) {
                for (int k : comp)
                    if (chordal(imgs[k], pstar) < 1e-3) {
                        hit = true;
                        break;
                    }
                if (hit) break;
            }
            if (hit) ++near;
        }
        return done(near == 1 ? Subtype::O1 : Subtype::O2);
    }

    for (int d = 0; d < 3; ++d)
        if (kind(d) == SigmaInfo::Kind::Complex) return done(Subtype::B);

    const auto ncomp = curve_counts(cube);
    std::vector<int> dirs;
    for (int d = 0; d < 3; ++d)
        if (ncomp[d] > 0) dirs.push_back(d);
    if (dirs.size() == 3) return done(Subtype::A1);
    if (dirs.size() == 1) return done(Subtype::A4);
    if (dirs.size() == 2) {
        std::array<int, 2> cc{ncomp[dirs[0]], ncomp[dirs[1]]};
        std::sort(cc.begin(), cc.end());
        return done(cc[0] == 2 && cc[1] == 2 ? Subtype::A2 : Subtype::A3);
    }
    throw UnclassifiableNumerically(
        "all sigma roots real and distinct but no direction carries singular curves");
}

} // namespace dcc
