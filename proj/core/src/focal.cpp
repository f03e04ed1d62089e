#include "dcc/analysis.hpp"

#include "dcc/errors.hpp"

#include <cmath>

namespace dcc {
namespace {

double norm2_9(const std::array<double, 9>& c) {
    double s = 0;
    for (double v : c) s += v * v;
    return std::sqrt(s);
}

} // namespace

BQCanonical bq_canonicalize(const std::array<double, 9>& c, double tol) {
    const double scale = norm2_9(c);
    BQCanonical out;

    if (std::abs(c[0]) <= tol * scale) {
        // leading coefficient vanished: the curve degenerates
        if (std::max(std::abs(c[1]), std::abs(c[2])) > tol * scale) {
            out.kind = BQCanonical::Kind::CircularCubic;
            return out;
        }
        out.kind = BQCanonical::Kind::Conic;
        return out;
    }

    for (int i : {1, 2, 4, 6, 7})
        if (std::abs(c[i]) >= tol * scale)
            throw NotSymmetricForm("quartic is not in symmetric position; a Moebius "
                                   "move is required first");

    const double L = c[0], A = c[3], B = c[5], G = c[8];
    if (std::abs(G) <= tol * scale)
        throw SingularCurve("constant term vanishes: the quartic passes through "
                            "the origin with a singular point");

    const double gam = G / L;
    out.mu = std::pow(std::abs(gam), 0.25);
    out.K = -A / (2 * L * out.mu * out.mu);
    out.M = B / (2 * L * out.mu * out.mu);
    out.delta = gam > 0 ? 1 : -1;

    // a double root of the axis restriction is a real singular point
    if (out.delta == 1 &&
        (std::abs(out.K - 1.0) < 1e-9 || std::abs(out.M + 1.0) < 1e-9))
        throw SingularCurve("axis restriction has a double root");

    out.kind = BQCanonical::Kind::SymmetricQuartic;
    return out;
}

FocalPoints focal_points(int delta, double a, double c) {
    if (delta == -1) {
        if (!(a > 0 && c > 0 && a * c > 1))
            throw OutOfRegion("delta = -1 requires a > 0, c > 0, a c > 1");
    } else if (delta == 1) {
        if (!(c < 0 && a > -c && -c > 1 / a))
            throw OutOfRegion("delta = +1 requires c < 0 and a > |c| > 1/a");
    } else {
        throw OutOfRegion("delta must be +1 or -1");
    }
    const double den = 1 + a * c * delta;
    if (std::abs(den) < 1e-9)
        throw OutOfRegion("middle parameter pole: 1 + a c delta vanishes");

    FocalPoints out;
    out.b = -(a + c) / den;
    out.K = -(c * delta + 1 / c) / 2;
    out.M = -(out.b * delta + 1 / out.b) / 2;
    out.N = -(a * delta + 1 / a) / 2;

    auto add = [](std::vector<Quat>& set, int axis, double T) {
        if (T <= 1e-14) return;
        const double v = std::sqrt(T);
        Quat p{};
        (axis == 0 ? p.x : axis == 1 ? p.y : p.z) = v;
        set.push_back(p);
        set.push_back(-p);
    };
    add(out.phi[0], 0, a * delta);
    add(out.phi[0], 0, 1 / a);
    add(out.phi[0], 1, -a * delta);
    add(out.phi[0], 1, -1 / a);
    add(out.phi[1], 0, -c * delta);
    add(out.phi[1], 0, -1 / c);
    add(out.phi[1], 2, c * delta);
    add(out.phi[1], 2, 1 / c);
    add(out.phi[2], 1, out.b * delta);
    add(out.phi[2], 1, 1 / out.b);
    add(out.phi[2], 2, -out.b * delta);
    add(out.phi[2], 2, -1 / out.b);
    return out;
}

} // namespace dcc
