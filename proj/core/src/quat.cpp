#include "dcc/quat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace dcc {

double chordal(const MPoint& p, const MPoint& q) {
    if (p.infinite && q.infinite) return 0.0;
    if (p.infinite) return 1.0 / std::sqrt(1.0 + norm2(q.v));
    if (q.infinite) return 1.0 / std::sqrt(1.0 + norm2(p.v));
    return norm(p.v - q.v) / std::sqrt((1.0 + norm2(p.v)) * (1.0 + norm2(q.v)));
}

std::array<double, 4> chordal_embedding(const MPoint& p) {
    if (p.infinite) return {0, 0, 0, 1};
    const double n2 = norm2(p.v);
    const double s = 1.0 / (1.0 + n2);
    return {2 * p.v.x * s, 2 * p.v.y * s, 2 * p.v.z * s, (n2 - 1) * s};
}

MPoint sphere_inversion(const Quat& q, double r2, const MPoint& p) {
    if (p.infinite) return MPoint(q);
    const Quat d = p.v - q;
    if (norm2(d) == 0.0) return MPoint::infinity();
    return MPoint(q - r2 * qinv(d));
}

Quat cross_ratio(const MPoint& p0, const MPoint& p1, const MPoint& p2, const MPoint& p3,
                 double tol) {
    const MPoint pts[4] = {p0, p1, p2, p3};
    for (int i = 0; i < 4; ++i)
        if (chordal(pts[i], pts[(i + 1) % 4]) < tol)
            throw CoincidentPoints("cross_ratio: consecutive points coincide");

    int inf = -1;
    for (int i = 0; i < 4; ++i)
        if (pts[i].infinite) inf = i;

    // A point at infinity cancels the two factors that contain it.
    switch (inf) {
        case 0: return qinv(p1.v - p2.v) * (p2.v - p3.v);
        case 1: return (p2.v - p3.v) * qinv(p3.v - p0.v);
        case 2: return (p0.v - p1.v) * qinv(p3.v - p0.v);
        case 3: return (p0.v - p1.v) * qinv(p1.v - p2.v);
        default: break;
    }
    return (p0.v - p1.v) * qinv(p1.v - p2.v) * (p2.v - p3.v) * qinv(p3.v - p0.v);
}

bool cospherical(std::span<const MPoint> pts, double tol) {
    if (pts.size() < 5) return true;
    Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), 5);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const MPoint& p = pts[static_cast<std::size_t>(i)];
        if (p.infinite)
            M.row(i) << 1, 0, 0, 0, 0;
        else
            M.row(i) << norm2(p.v), p.v.x, p.v.y, p.v.z, 1;
        M.row(i).normalize();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) <= tol * s(0);
}

bool cospherical(std::initializer_list<MPoint> pts, double tol) {
    std::vector<MPoint> v(pts);
    return cospherical(std::span<const MPoint>(v), tol);
}

MobiusMap MobiusMap::translation(const Quat& a) {
    MobiusMap m;
    m.steps_.push_back(Translation{Quat::vec(a.x, a.y, a.z)});
    return m;
}

MobiusMap MobiusMap::homothety(double lambda) {
    if (lambda == 0.0) throw InvalidParameter("homothety: lambda must be nonzero");
    MobiusMap m;
    m.steps_.push_back(Homothety{lambda});
    return m;
}

MobiusMap MobiusMap::unit_inversion() {
    MobiusMap m;
    m.steps_.push_back(UnitInversion{});
    return m;
}

MobiusMap MobiusMap::sphere_inversion(const Quat& q, double r2) {
    if (r2 == 0.0) throw InvalidParameter("sphere_inversion: r2 must be nonzero");
    MobiusMap m;
    m.steps_.push_back(SphereInversion{Quat::vec(q.x, q.y, q.z), r2});
    return m;
}

MobiusMap MobiusMap::rotation(const Quat& r) {
    const double n = norm(r);
    if (n == 0.0) throw InvalidParameter("rotation: zero quaternion");
    MobiusMap m;
    m.steps_.push_back(Rotation{r / n});
    return m;
}

MobiusMap MobiusMap::then(const MobiusMap& next) const {
    MobiusMap m(*this);
    m.steps_.insert(m.steps_.end(), next.steps_.begin(), next.steps_.end());
    return m;
}

MobiusMap MobiusMap::inverse() const {
    MobiusMap m;
    for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
        std::visit(
            [&m](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Translation>)
                    m.steps_.push_back(Translation{-s.a});
                else if constexpr (std::is_same_v<T, Homothety>)
                    m.steps_.push_back(Homothety{1.0 / s.lambda});
                else if constexpr (std::is_same_v<T, Rotation>)
                    m.steps_.push_back(Rotation{conj(s.r)});
                else
                    m.steps_.push_back(s); // inversions are involutions
            },
            *it);
    }
    return m;
}

MPoint MobiusMap::operator()(const MPoint& p) const {
    MPoint cur = p;
    for (const Step& st : steps_) {
        cur = std::visit(
            [&cur](const auto& s) -> MPoint {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Translation>) {
                    if (cur.infinite) return cur;
                    return MPoint(cur.v + s.a);
                } else if constexpr (std::is_same_v<T, Homothety>) {
                    if (cur.infinite) return cur;
                    return MPoint(s.lambda * cur.v);
                } else if constexpr (std::is_same_v<T, UnitInversion>) {
                    if (cur.infinite) return MPoint(Quat{});
                    if (norm2(cur.v) == 0.0) return MPoint::infinity();
                    return MPoint(-qinv(cur.v));
                } else if constexpr (std::is_same_v<T, Rotation>) {
                    if (cur.infinite) return cur;
                    return MPoint(s.r * cur.v * conj(s.r));
                } else {
                    return dcc::sphere_inversion(s.q, s.r2, cur);
                }
            },
            st);
    }
    return cur;
}

} // namespace dcc
