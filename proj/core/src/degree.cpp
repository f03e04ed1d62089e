#include "dcc/analysis.hpp"

#include "dcc/canonical.hpp"
#include "dcc/errors.hpp"
#include "dcc/rng.hpp"
#include "internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace dcc {
namespace {

// For a finite target p the preimages solve the four real trilinear equations
// U - p W = 0 in (s, t, u).  RP1^3 is covered by 8 chart combinations, chart
// bit 0 meaning raw pair (x, 1) and bit 1 meaning (1, x), each restricted to
// the box [-1, 1]^3.  Each component of the trilinear map attains its box
// extrema at the 8 corners, so a strict constant corner sign excludes a box.

using Tensor = std::array<std::array<double, 4>, 8>; // D[n] = u_n - p w_n

Tensor point_tensor(const Cube& cube, const Quat& p) {
    Tensor D;
    for (int n = 0; n < 8; ++n) {
        const Quat d = cube[n].u - p * cube[n].w;
        D[n] = {d.r, d.x, d.y, d.z};
    }
    return D;
}

// Bernstein pair of chart c at x: c == 0 -> (1-x, x), c == 1 -> (x-1, 1).
inline std::array<double, 2> chart_weights(double x, int c) {
    if (c == 0) return {1.0 - x, x};
    return {x - 1.0, 1.0};
}

inline std::array<double, 2> chart_dweights(int c) {
    if (c == 0) return {-1.0, 1.0};
    return {1.0, 0.0};
}

struct Box {
    std::array<double, 3> lo, hi;
};

void eval_corners(const Tensor& D, const std::array<int, 3>& chart, const Box& box,
                  double G[8][4]) {
    for (int corner = 0; corner < 8; ++corner) {
        double cx[3];
        for (int d = 0; d < 3; ++d)
            cx[d] = ((corner >> d) & 1) ? box.hi[d] : box.lo[d];
        const auto Bs = chart_weights(cx[0], chart[0]);
        const auto Bt = chart_weights(cx[1], chart[1]);
        const auto Bu = chart_weights(cx[2], chart[2]);
        for (int q = 0; q < 4; ++q) {
            double v = 0;
            for (int n = 0; n < 8; ++n)
                v += Bs[n & 1] * Bt[(n >> 1) & 1] * Bu[(n >> 2) & 1] * D[n][q];
            G[corner][q] = v;
        }
    }
}

bool excluded(const double G[8][4]) {
    for (int q = 0; q < 4; ++q) {
        bool pos = true, neg = true;
        for (int corner = 0; corner < 8; ++corner) {
            pos = pos && G[corner][q] > 0.0;
            neg = neg && G[corner][q] < 0.0;
        }
        if (pos || neg) return true;
    }
    return false;
}

std::vector<Box> solve_chart(const Tensor& D, const std::array<int, 3>& chart,
                             double width_tol = 5e-4, std::size_t max_boxes = 400000) {
    std::vector<Box> boxes{Box{{-1, -1, -1}, {1, 1, 1}}};
    std::vector<Box> cands, next;
    double G[8][4];
    while (!boxes.empty()) {
        next.clear();
        for (const Box& b : boxes) {
            eval_corners(D, chart, b, G);
            if (excluded(G)) continue;
            double wmax = 0;
            int wd = 0;
            for (int d = 0; d < 3; ++d) {
                const double w = b.hi[d] - b.lo[d];
                if (w > wmax) {
                    wmax = w;
                    wd = d;
                }
            }
            if (wmax < width_tol) {
                cands.push_back(b);
                continue;
            }
            const double mid = 0.5 * (b.lo[wd] + b.hi[wd]);
            Box a = b, c = b;
            a.hi[wd] = mid;
            c.lo[wd] = mid;
            next.push_back(a);
            next.push_back(c);
        }
        if (next.size() > max_boxes)
            throw SolverInconclusive("preimage box subdivision exploded");
        boxes.swap(next);
    }
    return cands;
}

void g_and_j(const Tensor& D, const std::array<int, 3>& chart,
             const std::array<double, 3>& x, Eigen::Vector4d& G,
             Eigen::Matrix<double, 4, 3>& J) {
    const std::array<std::array<double, 2>, 3> B = {
        chart_weights(x[0], chart[0]), chart_weights(x[1], chart[1]),
        chart_weights(x[2], chart[2])};
    const std::array<std::array<double, 2>, 3> dB = {
        chart_dweights(chart[0]), chart_dweights(chart[1]), chart_dweights(chart[2])};
    G.setZero();
    J.setZero();
    for (int n = 0; n < 8; ++n) {
        const int bit[3] = {n & 1, (n >> 1) & 1, (n >> 2) & 1};
        const double w = B[0][bit[0]] * B[1][bit[1]] * B[2][bit[2]];
        for (int q = 0; q < 4; ++q) G(q) += w * D[n][q];
        for (int d = 0; d < 3; ++d) {
            double wd = dB[d][bit[d]];
            for (int o = 0; o < 3; ++o)
                if (o != d) wd *= B[o][bit[o]];
            for (int q = 0; q < 4; ++q) J(q, d) += wd * D[n][q];
        }
    }
}

std::array<double, 3> newton(const Tensor& D, const std::array<int, 3>& chart,
                             std::array<double, 3> x, int iters = 30) {
    Eigen::Vector4d G;
    Eigen::Matrix<double, 4, 3> J;
    for (int it = 0; it < iters; ++it) {
        g_and_j(D, chart, x, G, J);
        Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(
            J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::Vector3d dx = svd.solve(-G);
        const double step = dx.norm();
        if (step > 0.5) dx *= 0.5 / step;
        for (int d = 0; d < 3; ++d) x[d] += dx(d);
        if (step < 1e-14) break;
    }
    return x;
}

using Pair = std::array<double, 2>;

Pair norm_pair(double x, int c) {
    Pair v = (c == 0) ? Pair{x, 1.0} : Pair{1.0, x};
    const double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

double pair_dist(const Pair& a, const Pair& b) {
    const double dm = std::hypot(a[0] - b[0], a[1] - b[1]);
    const double dp = std::hypot(a[0] + b[0], a[1] + b[1]);
    return std::min(dm, dp);
}

using Root = std::array<Pair, 3>;

// distinct preimages of a finite target, as normalized RP1 pairs
std::vector<Root> preimages(const Cube& cube, const Quat& p, double scale) {
    const Tensor D = point_tensor(cube, p);
    const double pn = norm(p);
    std::vector<Root> roots;
    for (int ci = 0; ci < 8; ++ci) {
        const std::array<int, 3> chart = {ci & 1, (ci >> 1) & 1, (ci >> 2) & 1};
        for (const Box& box : solve_chart(D, chart)) {
            std::array<double, 3> x0;
            for (int d = 0; d < 3; ++d) x0[d] = 0.5 * (box.lo[d] + box.hi[d]);
            const auto x = newton(D, chart, x0);
            if (std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) > 1.0 + 1e-6)
                continue;
            Root pairs;
            for (int d = 0; d < 3; ++d) pairs[d] = norm_pair(x[d], chart[d]);
            const Hom h = eval_hom(cube, RP1(pairs[0][0], pairs[0][1]),
                                   RP1(pairs[1][0], pairs[1][1]),
                                   RP1(pairs[2][0], pairs[2][1]));
            const double denom = norm(h.u) + pn * norm(h.w);
            if (denom < 1e-9 * scale) continue; // base point: U and W vanish together
            if (norm(h.u - p * h.w) / denom > 1e-9) continue;
            const bool dup = std::any_of(roots.begin(), roots.end(), [&](const Root& r) {
                double worst = 0;
                for (int d = 0; d < 3; ++d)
                    worst = std::max(worst, pair_dist(pairs[d], r[d]));
                return worst <= 1e-5;
            });
            if (!dup) roots.push_back(pairs);
        }
    }
    return roots;
}

std::vector<MPoint> singular_images(const Cube& cube) {
    std::vector<MPoint> out;
    for (int d = 0; d < 3; ++d) {
        const auto pts = detail::collapse_points(cube, d, 120);
        if (pts.empty()) continue;
        for (const MPoint& p : detail::collapse_images(cube, d, pts))
            if (!p.infinite) out.push_back(p);
    }
    return out;
}

// generic on-surface targets pushed away from the singular images
std::vector<MPoint> generic_targets(const Cube& cube, int count, Rng& rng,
                                    const std::vector<MPoint>& simgs) {
    std::vector<MPoint> out;
    int tries = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++tries >= 400) throw SolverInconclusive("no generic target found");
        const double s = rng.uniform(-1.4, 1.4);
        const double t = rng.uniform(-1.4, 1.4);
        const double u = rng.uniform(-1.4, 1.4);
        MPoint p;
        try {
            p = eval_cube(cube, RP1(s), RP1(t), RP1(u));
        } catch (const Error&) {
            continue;
        }
        if (p.infinite || norm(p.v) > 50.0) continue;
        bool bad = false;
        for (const MPoint& q : simgs)
            if (chordal(p, q) < 0.05) {
                bad = true;
                break;
            }
        for (const MPoint& q : out)
            if (chordal(p, q) < 1e-3) {
                bad = true;
                break;
            }
        if (!bad) out.push_back(p);
    }
    return out;
}

} // namespace

int degree(const Cube& cube, std::uint64_t seed) {
    detail::require_nondegenerate(cube);
    const double scale = net_scale(cube);
    Rng rng(seed);
    const auto simgs = singular_images(cube);
    const auto targets = generic_targets(cube, 3, rng, simgs);
    std::array<int, 3> counts{};
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto roots = preimages(cube, targets[i].v, scale);
        for (const Root& r : roots) {
            const MPoint img = eval_cube(cube, RP1(r[0][0], r[0][1]), RP1(r[1][0], r[1][1]),
                                         RP1(r[2][0], r[2][1]));
            if (img.infinite || chordal(img, targets[i]) > 1e-9)
                throw SolverInconclusive("preimage does not map back to its target");
        }
        counts[i] = static_cast<int>(roots.size());
    }
    if (counts[0] != counts[1] || counts[1] != counts[2])
        throw SolverInconclusive("preimage counts disagree between generic targets");
    return counts[0];
}

int preimage_count(const Cube& cube, const MPoint& p) {
    detail::require_nondegenerate(cube);
    const auto simgs = singular_images(cube);
    for (const MPoint& q : simgs)
        if (chordal(p, q) < 0.05)
            throw PointNearSingularity("target within chordal 0.05 of the singular image");
    if (p.infinite) {
        // inversion at the origin moves infinity to a finite chart
        const Cube moved = apply_inversion_to_net(cube, Quat{}, 1.0);
        return preimage_count(moved, MPoint(Quat{}));
    }
    return static_cast<int>(preimages(cube, p.v, net_scale(cube)).size());
}

} // namespace dcc
