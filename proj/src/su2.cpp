#include "spinbath/su2.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinbath::su2 {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double mod_2pi(double x) {
    double m = std::fmod(x, two_pi);
    if (m < 0.0) m += two_pi;
    return m;
}

// Tolerance below which the phase of a (x_i, x_j) pair is numerically undefined.
constexpr double boundary_tol = 1e-12;

} // namespace

double QuaternionState::norm() const {
    return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4);
}

QuaternionState QuaternionState::normalized() const {
    const double n = norm();
    return {x1 / n, x2 / n, x3 / n, x4 / n};
}

UnitaryMatrix angles_to_matrix(const AngleState& a) {
    using namespace std::complex_literals;
    const double c = std::cos(a.chi), s = std::sin(a.chi);
    const std::complex<double> ea = std::exp(-1i * (a.phi / 2.0 + a.psi));
    const std::complex<double> eb = std::exp(-1i * (a.phi / 2.0 - a.psi));
    UnitaryMatrix u;
    u << c * ea, s * eb, -s * std::conj(eb), c * std::conj(ea);
    return u;
}

UnitaryMatrix quaternion_to_matrix(const QuaternionState& q) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("su2: quaternion state is not normalized");
    UnitaryMatrix u;
    u << std::complex<double>(q.x4, q.x3), std::complex<double>(q.x2, q.x1),
        std::complex<double>(-q.x2, q.x1), std::complex<double>(q.x4, -q.x3);
    return u;
}

QuaternionState angles_to_quaternion(const AngleState& a) {
    const double c = std::cos(a.chi), s = std::sin(a.chi);
    const double alpha = a.phi / 2.0 + a.psi;
    const double beta = a.phi / 2.0 - a.psi;
    return {-s * std::sin(beta), s * std::cos(beta), -c * std::sin(alpha), c * std::cos(alpha)};
}

AngleState quaternion_to_angles(const QuaternionState& q) {
    const double r12 = std::hypot(q.x1, q.x2);  // sin(chi)
    const double r34 = std::hypot(q.x3, q.x4);  // cos(chi)
    AngleState a;
    a.chi = std::atan2(r12, r34);
    if (r12 < boundary_tol) {
        // chi = 0: whole phase goes into phi, psi = 0
        a.phi = 2.0 * mod_2pi(-std::atan2(q.x3, q.x4));
        a.psi = 0.0;
    } else if (r34 < boundary_tol) {
        // chi = pi/2: whole phase goes into psi, phi = 0
        a.phi = 0.0;
        a.psi = mod_2pi(std::atan2(q.x1, q.x2));
    } else {
        const double alpha = mod_2pi(-std::atan2(q.x3, q.x4));
        const double beta = mod_2pi(-std::atan2(q.x1, q.x2));
        a.phi = mod_2pi(alpha + beta);
        a.psi = mod_2pi(alpha - a.phi / 2.0);
    }
    return a;
}

AngleState haar_sample(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    AngleState a;
    a.chi = std::asin(std::sqrt(unit(rng)));
    a.phi = two_pi * unit(rng);
    a.psi = two_pi * unit(rng);
    return a;
}

ControlFields control_fields(const AngleState& a) {
    const double s2 = std::sin(2.0 * a.chi);
    if (std::abs(s2) < boundary_tol)
        throw std::domain_error("su2: control fields are singular at chi in {0, pi/2}");
    const double cot2 = std::cos(2.0 * a.chi) / s2;
    const double cp = std::cos(a.phi), sp = std::sin(a.phi);
    ControlFields f;
    f.b0 = {0.0, 1.0, 0.0};
    f.b1 = {sp, 2.0 * cp * cot2, -cp / s2};
    f.b2 = {cp, -2.0 * sp * cot2, sp / s2};
    return f;
}

double control_fields_det(const AngleState& a) {
    const auto f = control_fields(a);
    Eigen::Matrix3d m;
    m << f.b0[0], f.b0[1], f.b0[2], f.b1[0], f.b1[1], f.b1[2], f.b2[0], f.b2[1], f.b2[2];
    return m.determinant();
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 field(int which, const AngleState& a) {
    const auto f = control_fields(a);
    return which == 0 ? f.b0 : which == 1 ? f.b1 : f.b2;
}

// Central-difference Jacobian J[c][d] = d b^c / d x_d at a.
std::array<Vec3, 3> jacobian(int which, const AngleState& a, double h) {
    std::array<Vec3, 3> jac{};
    for (int d = 0; d < 3; ++d) {
        AngleState ap = a, am = a;
        double* pp = d == 0 ? &ap.chi : d == 1 ? &ap.phi : &ap.psi;
        double* pm = d == 0 ? &am.chi : d == 1 ? &am.phi : &am.psi;
        *pp += h;
        *pm -= h;
        const Vec3 fp = field(which, ap), fm = field(which, am);
        for (int c = 0; c < 3; ++c) jac[c][d] = (fp[c] - fm[c]) / (2.0 * h);
    }
    return jac;
}

Vec3 apply(const std::array<Vec3, 3>& jac, const Vec3& v) {
    Vec3 out{};
    for (int c = 0; c < 3; ++c) out[c] = jac[c][0] * v[0] + jac[c][1] * v[1] + jac[c][2] * v[2];
    return out;
}

// Bracket of vector fields: [A_i, A_j] = (D b_j) b_i - (D b_i) b_j.
Vec3 bracket(int i, int j, const AngleState& a, double h) {
    const auto ji = jacobian(i, a, h), jj = jacobian(j, a, h);
    const Vec3 bi = field(i, a), bj = field(j, a);
    const Vec3 u = apply(jj, bi), v = apply(ji, bj);
    return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}

double max_abs(const Vec3& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

} // namespace

double verify_brackets(std::span<const AngleState> points, double fd_step) {
    double worst = 0.0;
    for (const auto& a : points) {
        const auto f = control_fields(a);
        const Vec3 c01 = bracket(0, 1, a, fd_step);
        const Vec3 c02 = bracket(0, 2, a, fd_step);
        const Vec3 c12 = bracket(1, 2, a, fd_step);
        const Vec3 r1 = {c01[0] - f.b2[0], c01[1] - f.b2[1], c01[2] - f.b2[2]};
        const Vec3 r2 = {c02[0] + f.b1[0], c02[1] + f.b1[1], c02[2] + f.b1[2]};
        const Vec3 r3 = {c12[0] - 4.0 * f.b0[0], c12[1] - 4.0 * f.b0[1], c12[2] - 4.0 * f.b0[2]};
        worst = std::max({worst, max_abs(r1), max_abs(r2), max_abs(r3)});
    }
    return worst;
}

} // namespace spinbath::su2
