#include "dcc/canonical.hpp"

#include "dcc/construct.hpp"
#include "dcc/rng.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace dcc {

namespace {

Cube make_net(const Quat (&u)[8], const Quat (&w)[8]) {
    Cube out;
    for (std::size_t n = 0; n < 8; ++n) out[n] = {u[n], w[n]};
    return out;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidParameter(msg);
}

std::string fmt_params(std::span<const double> p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    return os.str();
}

} // namespace

std::string_view to_string(Coarse c) {
    switch (c) {
        case Coarse::A: return "A";
        case Coarse::B: return "B";
        case Coarse::O: return "O";
        case Coarse::S: return "S";
    }
    return "?";
}

std::string_view to_string(Subtype s) {
    switch (s) {
        case Subtype::A1: return "A1";
        case Subtype::A2: return "A2";
        case Subtype::A3: return "A3";
        case Subtype::A4: return "A4";
        case Subtype::B: return "B";
        case Subtype::O1: return "O1";
        case Subtype::O2: return "O2";
        case Subtype::S1: return "S1";
        case Subtype::S2: return "S2";
        case Subtype::S3: return "S3";
        case Subtype::S4: return "S4";
    }
    return "?";
}

Coarse coarse_of(Subtype s) {
    switch (s) {
        case Subtype::A1:
        case Subtype::A2:
        case Subtype::A3:
        case Subtype::A4: return Coarse::A;
        case Subtype::B: return Coarse::B;
        case Subtype::O1:
        case Subtype::O2: return Coarse::O;
        default: return Coarse::S;
    }
}

Cube type_a_cube(double a, double b, double c) {
    const double d = a + b + c;
    const Quat u[8] = {{}, QI, QJ, QI + QJ, QK, QI + QK, QJ + QK, Quat(d, 1, 1, 1)};
    const Quat w[8] = {Quat(1),          Quat(1), Quat(1), Quat(1, 0, 0, -a),
                       Quat(1),          Quat(1, 0, -c, 0), Quat(1, -b, 0, 0),
                       Quat(1, -b, -c, -a)};
    return make_net(u, w);
}

Cube type_a4_cube(double a) {
    require(a != -1.0, "type_a4_cube: requires a != -1");
    const double g = 2 * a / (1 + a);
    const double e = (1 - a) / (1 + a);
    const Quat u[8] = {{}, QI, {}, QI, QK, QI + QK, QK, Quat(-e, 1, 0, 1)};
    const Quat w[8] = {Quat(1), Quat(1), Quat(1),           Quat(1, 0, 0, 1),
                       Quat(1), Quat(1), Quat(1, -g, 0, 0), Quat(1, -g, 0, 1)};
    return make_net(u, w);
}

Cube offset_1polar_cube() {
    const Quat u[8] = {{}, QI, {}, QI, QK, QI + QK, QK, Quat(-1, 1, 0, 1)};
    const Quat w[8] = {Quat(1), Quat(1), Quat(1), Quat(1, 0, 0, 1),
                       Quat(1), Quat(1), Quat(1), Quat(1, 0, 0, 1)};
    return make_net(u, w);
}

Cube two_plane_cube(double a, double b, double c) {
    const Quat u[8] = {{},
                       QI,
                       QJ,
                       QI + QJ,
                       Quat(0, 0, 0, 2),
                       QI + QK,
                       Quat(-1, 0, 1, 2),
                       Quat(-2 * (a + b) - 1, 1, 1, 1)};
    const Quat w[8] = {Quat(1),
                       Quat(1),
                       Quat(1),
                       Quat(1, 0, 0, -c),
                       Quat(1, 0, 1, 0),
                       Quat(1, 0, 2 * a + 2 * c + 1, 0),
                       Quat(1, 2 * b, 1, 0),
                       Quat(1, 2 * b - c, 2 * a + 2 * c + 1, -c)};
    return make_net(u, w);
}

Cube type_b_cube(double k, double m) {
    require(k != 0.0 && k != 1.0 && k != -1.0, "type_b_cube: requires k not in {0, 1, -1}");
    require(m != 0.0 && m != 1.0 && m != -1.0, "type_b_cube: requires m not in {0, 1, -1}");
    require(std::abs(k + m) > 1e-12 * (1 + std::abs(k) + std::abs(m)),
            "type_b_cube: requires k != -m");
    require(std::abs(k * m - 1) > 1e-12 * (1 + std::abs(k * m)),
            "type_b_cube: requires k*m != 1");
    const double s1 = (k + m) * (k + m), s2 = (k * m - 1) * (k * m - 1);
    require(std::abs(s1 - s2) > 1e-12 * (s1 + s2),
            "type_b_cube: requires (k+m)^2 != (k*m-1)^2");

    const double h0 = 2 * (k - m) * (k * m + 1);
    const double h1 = -(s1 - s2) * (k - m) * (k * m + 1) / ((m + k) * (k * m - 1));
    const Quat u[8] = {{},      QI,
                       2 * k * QJ, (k * k - 1) * QJ,
                       -2 * m * QK, -(m * m - 1) * QK,
                       Quat(h0), Quat(h1)};
    const Quat w[8] = {Quat(1), {},
                       (k * k - 1) * QK, -2 * k * QK,
                       (m * m - 1) * QJ, -2 * m * QJ,
                       -h1 * QI, h0 * QI};
    return make_net(u, w);
}

Cube offset_o1_cube(double h) {
    require(h != 0.0 && h != 1.0 && h != -1.0, "offset_o1_cube: requires h not in {0, 1, -1}");
    const Quat u[8] = {-1.0 * QI, h * QJ, h * QK, Quat(h),
                       -2.0 * QI, (h + 1) * QJ, (h - 1) * QK, {}};
    const Quat w[8] = {Quat(1), -1.0 * QK, -1.0 * QJ, -h * QI,
                       Quat(1), -1.0 * QK, -1.0 * QJ, -h * QI};
    return make_net(u, w);
}

Cube offset_o2_cube() {
    const Quat u[8] = {Quat(1), -1.0 * QK, -3.0 * QJ, -4.0 * QI,
                       Quat(1), -2.0 * QK, -2.0 * QJ, {}};
    const Quat w[8] = {{}, -1.0 * QJ, -1.0 * QK, Quat(-4), {}, -1.0 * QJ, -1.0 * QK, Quat(-4)};
    return make_net(u, w);
}

Cube s1_cube(double a) {
    const Quat u[8] = {QI,        QI + QJ,          QI + QK,          Quat(a, 1, 1, 1),
                       -1.0 * QI, -1.0 * (QI + QJ), -1.0 * (QI + QK), Quat(-a, -1, -1, -1)};
    const Quat wr[4] = {Quat(1), Quat(1, 0, 0, 1), Quat(1, 0, -1, 0), Quat(1, -a, -1, 1)};
    const Quat w[8] = {wr[0], wr[1], wr[2], wr[3], wr[0], wr[1], wr[2], wr[3]};
    return make_net(u, w);
}

Cube general_cube(double g, double h, double a, double b, double c) {
    const double eta = g * g + h * h;
    require(eta > 0, "general_cube: requires (g, h) != (0, 0)");
    const Quat u[8] = {Quat(1),
                       {},
                       QI,
                       c * QK,
                       -h * QI + g * QJ,
                       eta * (b - 1) * QJ,
                       Quat(-h) + (eta * a + a - 1) * QI + g * QK,
                       c * g * QI + c * h * QJ + eta * (b - 1) * QK};
    const Quat w[8] = {{},
                       -1.0 * QI,
                       -1.0 * QJ,
                       Quat(1),
                       -1.0 * QK,
                       Quat(-h) + g * QK,
                       Quat(g) + QJ + h * QK,
                       Quat((eta + 1) * (a - 1) + b * eta + c) + h * QI - g * QJ};
    return make_net(u, w);
}

Patch bipolar_patch(double a) {
    Patch out;
    out[0] = {{}, Quat(1)};
    out[1] = {QI, Quat(1)};
    out[2] = {QJ, Quat(1)};
    out[3] = {QI + QJ, Quat(1, 0, 0, -a)};
    return out;
}

Patch onepolar_patch() {
    Patch out;
    out[0] = {{}, Quat(1)};
    out[1] = {QI, Quat(1)};
    out[2] = {{}, Quat(1)};
    out[3] = {QI, Quat(1, 0, 0, 1)};
    return out;
}

Cube spherical_cube(Subtype which, double a) {
    switch (which) {
        case Subtype::S1: return s1_cube(a);
        case Subtype::S2: return offset_1polar_cube();
        case Subtype::S3:
            require(a < 0, "spherical_cube: S3 requires a < 0 (a = 0 is cylindrical S2, "
                           "a > 0 places the poles on the axis and gives S1)");
            return axial_cube(bipolar_patch(a), QI);
        case Subtype::S4: return axial_cube(net_translate(onepolar_patch(), QJ), QI);
        default: throw InvalidParameter("spherical_cube: subtype must be S1..S4");
    }
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        std::vector<CatalogEntry> v;
        const Quat axis = (QI + QJ) / std::sqrt(2.0);
        const Patch polar = apply_inversion_to_net(bipolar_patch(0.6),
                                                   Quat::vec(1.0 / std::sqrt(0.6), 0, 0), 1.0);
        v.push_back({"S1 generic a=0.7", s1_cube(0.7), Subtype::S1});
        v.push_back({"S1 classical a=1", s1_cube(1.0), Subtype::S1});
        v.push_back({"S1 one-polar a=0", s1_cube(0.0), Subtype::S1});
        v.push_back({"S2 bipolar offset", offset_cube(bipolar_patch(-0.5), QK, 1.0), Subtype::S2});
        v.push_back({"S2 polar offset", offset_cube(polar, patch_normal(polar), 1.0), Subtype::S2});
        v.push_back({"S2 one-polar offset", offset_1polar_cube(), Subtype::S2});
        v.push_back({"S2 cartesian offset", offset_cube(bipolar_patch(0.0), QK, 1.0), Subtype::S2});
        v.push_back({"S3 generic axis", axial_cube(bipolar_patch(-0.5), axis), Subtype::S3});
        v.push_back({"S3 poles on axis", axial_cube(bipolar_patch(0.5), QI), Subtype::S1});
        v.push_back({"S3 mirror poles", axial_cube(bipolar_patch(-0.5), QI), Subtype::S3});
        v.push_back({"S4 axis off pole",
                     axial_cube(net_translate(onepolar_patch(), QJ), QI), Subtype::S4});
        v.push_back({"S4 axis through pole", axial_cube(onepolar_patch(), QI), Subtype::S2});
        v.push_back({"cylindrical axial", axial_cube(bipolar_patch(0.0), QI), Subtype::S2});
        v.push_back({"O1 h=0.5", offset_o1_cube(0.5), Subtype::O1});
        v.push_back({"O1 h=-0.7", offset_o1_cube(-0.7), Subtype::O1});
        v.push_back({"O2", offset_o2_cube(), Subtype::O2});
        v.push_back({"A1 (1,2,3)", type_a_cube(1, 2, 3), Subtype::A1});
        v.push_back({"A2 (1,2,-0.5)", type_a_cube(1, 2, -0.5), Subtype::A2});
        v.push_back({"A3 (0,0.4,-1)", type_a_cube(0, 0.4, -1), Subtype::A3});
        v.push_back({"A4 a=0.4", type_a4_cube(0.4), Subtype::A4});
        v.push_back({"two-plane (1,2,3)", two_plane_cube(1, 2, 3), Subtype::B});
        v.push_back({"type B (2,1.5)", type_b_cube(2, 1.5), Subtype::B});
        return v;
    }();
    return entries;
}

Family make_family(std::string_view label, std::span<const double> params) {
    std::string name(label);
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));

    const auto need = [&](std::size_t n) {
        if (params.size() != n) {
            std::ostringstream os;
            os << "make_family: " << name << " takes " << n << " parameter(s), got "
               << params.size() << " (" << fmt_params(params) << ")";
            throw InvalidParameter(os.str());
        }
    };

    Family f;
    f.label = name;
    f.params.assign(params.begin(), params.end());
    if (name == "A") {
        need(3);
        f.cube = type_a_cube(params[0], params[1], params[2]);
        f.expected = "A (A1/A2/A3 by the singular curve pattern)";
    } else if (name == "A4") {
        need(1);
        f.cube = type_a4_cube(params[0]);
        f.expected = params[0] == 0 ? "S2 (a = 0 degenerates to the cylindrical class)" : "A4";
    } else if (name == "TP") {
        need(3);
        f.cube = two_plane_cube(params[0], params[1], params[2]);
        const double a = params[0], c = params[2];
        f.expected = (std::abs(c - a * a) < 1e-12 * (1 + a * a))
                         ? "O (boundary c = a^2 of the two-plane family)"
                         : "B";
    } else if (name == "B") {
        need(2);
        f.cube = type_b_cube(params[0], params[1]);
        f.expected = "B";
    } else if (name == "O1") {
        need(1);
        f.cube = offset_o1_cube(params[0]);
        f.expected = "O1";
    } else if (name == "O2") {
        need(0);
        f.cube = offset_o2_cube();
        f.expected = "O2";
    } else if (name == "S1") {
        need(1);
        f.cube = s1_cube(params[0]);
        f.expected = "S1";
    } else if (name == "S2") {
        need(0);
        f.cube = offset_1polar_cube();
        f.expected = "S2";
    } else if (name == "S3") {
        need(1);
        f.cube = spherical_cube(Subtype::S3, params[0]);
        f.expected = "S3";
    } else if (name == "S4") {
        need(0);
        f.cube = spherical_cube(Subtype::S4);
        f.expected = "S4";
    } else if (name == "GEN") {
        need(5);
        f.cube = general_cube(params[0], params[1], params[2], params[3], params[4]);
        f.expected = "by discriminant signs";
    } else {
        throw InvalidParameter("make_family: unknown family label '" + std::string(label) +
                               "' (expected A, A4, TP, B, O1, O2, S1, S2, S3, S4, GEN)");
    }
    return f;
}

Cube random_mobius_move(const Cube& cube, int k, Rng& rng) {
    auto normal = [&rng] {
        double u1 = rng.uniform();
        while (u1 <= 0) u1 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * rng.uniform());
    };
    Quat r{normal(), normal(), normal(), normal()};
    r = r * (1.0 / r.norm());
    Cube out = net_rotate(cube, r);
    out = net_scale_by(out, rng.uniform(0.6, 1.8));
    out = net_translate(out, Quat::vec(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8),
                                       rng.uniform(-0.8, 0.8)));
    if (k % 2 == 0) {
        Quat q = Quat::vec(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        q = q * (rng.uniform(1.8, 2.6) / q.norm());
        out = apply_inversion_to_net(out, q, rng.uniform(0.6, 1.4));
    }
    return out;
}

} // namespace dcc
