#pragma once

#include "dcc/errors.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <variant>
#include <vector>

namespace dcc {

// Absolute / relative tolerance pair used across the library.
struct Tol {
    double abs = 1e-9;
    double rel = 1e-9;
};

// Quaternion q = r + x i + y j + z k.
struct Quat {
    double r = 0, x = 0, y = 0, z = 0;

    constexpr Quat() = default;
    constexpr Quat(double r_, double x_ = 0, double y_ = 0, double z_ = 0)
        : r(r_), x(x_), y(y_), z(z_) {}

    // Imaginary quaternion x i + y j + z k, i.e. a point of R^3.
    static constexpr Quat vec(double x_, double y_, double z_) { return Quat(0, x_, y_, z_); }

    constexpr Quat operator-() const { return {-r, -x, -y, -z}; }
    constexpr Quat& operator+=(const Quat& o) { r += o.r; x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Quat& operator-=(const Quat& o) { r -= o.r; x -= o.x; y -= o.y; z -= o.z; return *this; }
};

constexpr Quat operator+(Quat a, const Quat& b) { return a += b; }
constexpr Quat operator-(Quat a, const Quat& b) { return a -= b; }
constexpr Quat operator*(double s, const Quat& q) { return {s * q.r, s * q.x, s * q.y, s * q.z}; }
constexpr Quat operator*(const Quat& q, double s) { return s * q; }
constexpr Quat operator/(const Quat& q, double s) { return (1.0 / s) * q; }

// Hamilton product.
constexpr Quat operator*(const Quat& a, const Quat& b) {
    return {a.r * b.r - a.x * b.x - a.y * b.y - a.z * b.z,
            a.r * b.x + a.x * b.r + a.y * b.z - a.z * b.y,
            a.r * b.y - a.x * b.z + a.y * b.r + a.z * b.x,
            a.r * b.z + a.x * b.y - a.y * b.x + a.z * b.r};
}

constexpr Quat conj(const Quat& q) { return {q.r, -q.x, -q.y, -q.z}; }
constexpr double norm2(const Quat& q) { return q.r * q.r + q.x * q.x + q.y * q.y + q.z * q.z; }
inline double norm(const Quat& q) { return std::sqrt(norm2(q)); }

// Euclidean scalar product of R^4; for pairs (u, w) this is the quadric
// whose zero set carries the parametrizations handled by this library.
constexpr double dot(const Quat& a, const Quat& b) {
    return a.r * b.r + a.x * b.x + a.y * b.y + a.z * b.z;
}

// q^{-1} = conj(q) / |q|^2.  Caller guards against zero.
inline Quat qinv(const Quat& q) { return conj(q) / norm2(q); }

constexpr Quat QI{0, 1, 0, 0};
constexpr Quat QJ{0, 0, 1, 0};
constexpr Quat QK{0, 0, 0, 1};

// Point of the Moebius sphere R^3 cup {inf}, stored as an imaginary quaternion.
struct MPoint {
    Quat v{};
    bool infinite = false;

    constexpr MPoint() = default;
    constexpr MPoint(const Quat& q) : v(q) {}
    static constexpr MPoint infinity() { return MPoint(Quat{}, true); }
    static constexpr MPoint at(double x, double y, double z) { return MPoint(Quat::vec(x, y, z)); }

  private:
    constexpr MPoint(const Quat& q, bool inf) : v(q), infinite(inf) {}
};

// Chordal distance on the Moebius sphere; range [0, 2], d(p, inf) = 1/sqrt(1+|p|^2).
double chordal(const MPoint& p, const MPoint& q);

// Embedding of the Moebius sphere into the unit sphere of R^4:
// p -> (2p, |p|^2 - 1) / (1 + |p|^2), inf -> (0,0,0,1).
// Satisfies |emb(p) - emb(q)| = 2 * chordal(p, q).
std::array<double, 4> chordal_embedding(const MPoint& p);

// Inversion in the sphere of center q (imaginary) and squared radius r2:
// p -> q - r2 * (p - q)^{-1}.  r2 < 0 inverts in an imaginary sphere.
// Exchanges q and inf.
MPoint sphere_inversion(const Quat& q, double r2, const MPoint& p);

// Quaternionic cross ratio (p0-p1)(p1-p2)^{-1}(p2-p3)(p3-p0)^{-1};
// real iff the four points are concircular.  A point at infinity drops the
// two factors containing it.  Throws CoincidentPoints when a factor that
// must be inverted vanishes.
Quat cross_ratio(const MPoint& p0, const MPoint& p1, const MPoint& p2, const MPoint& p3,
                 double tol = 1e-12);

// True when all points lie on a common sphere or plane (rank test on rows
// (|p|^2, x, y, z, 1), with (1,0,0,0,0) for the point at infinity).
// Fewer than five points are always cospherical.
bool cospherical(std::span<const MPoint> pts, double tol = 1e-8);
bool cospherical(std::initializer_list<MPoint> pts, double tol = 1e-8);

// Moebius transformation as a word in the four generators.
class MobiusMap {
  public:
    static MobiusMap translation(const Quat& a);      // p -> p + a, a imaginary
    static MobiusMap homothety(double lambda);        // p -> lambda p, lambda != 0
    static MobiusMap unit_inversion();                // p -> -p^{-1}
    static MobiusMap sphere_inversion(const Quat& q, double r2);
    static MobiusMap rotation(const Quat& r);         // p -> r p r^{-1}, |r| = 1

    // Composition: (a.then(b))(p) = b(a(p)).
    MobiusMap then(const MobiusMap& next) const;
    MobiusMap inverse() const;

    MPoint operator()(const MPoint& p) const;

    struct Translation { Quat a; };
    struct Homothety { double lambda; };
    struct UnitInversion {};
    struct SphereInversion { Quat q; double r2; };
    struct Rotation { Quat r; };

    using Step = std::variant<Translation, Homothety, UnitInversion, SphereInversion, Rotation>;
    const std::vector<Step>& steps() const { return steps_; }

  private:
    std::vector<Step> steps_;
};

} // namespace dcc
