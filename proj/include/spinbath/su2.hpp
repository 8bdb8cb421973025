#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>
#include <span>

namespace spinbath::su2 {

// Coordinates x1..x4 on the unit 3-sphere: U = i(x1 s1 + x2 s2 + x3 s3) + x4 I
// with s1..s3 the Pauli matrices, so
//   U = [[ x4 + i x3,  x2 + i x1 ],
//        [ -x2 + i x1, x4 - i x3 ]].
struct QuaternionState {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0, x4 = 1.0;

    double norm() const;
    QuaternionState normalized() const;
};

// Angle coordinates (chi, phi, psi), chi in [0, pi/2]:
//   U = [[ cos(chi) e^{-i(phi/2+psi)},  sin(chi) e^{-i(phi/2-psi)} ],
//        [ -sin(chi) e^{i(phi/2-psi)},  cos(chi) e^{i(phi/2+psi)}  ]].
// (phi, psi) live on a twisted torus: u(chi, phi+2pi, psi) = u(chi, phi, psi+pi).
// Canonical reduction used throughout: the phases alpha = phi/2+psi and
// beta = phi/2-psi are reduced to [0, 2pi), then phi = (alpha+beta) mod 2pi and
// psi = (alpha - phi/2) mod 2pi. At the boundaries one phase is undefined:
// at chi = 0 we set psi = 0 and put the whole phase in phi (range [0, 4pi));
// at chi = pi/2 we set phi = 0 and put it in psi.
struct AngleState {
    double chi = 0.0, phi = 0.0, psi = 0.0;
};

using UnitaryMatrix = Eigen::Matrix2cd;

UnitaryMatrix angles_to_matrix(const AngleState& a);

// Throws std::invalid_argument if | ||x|| - 1 | > 1e-9.
UnitaryMatrix quaternion_to_matrix(const QuaternionState& q);

AngleState quaternion_to_angles(const QuaternionState& q);
QuaternionState angles_to_quaternion(const AngleState& a);

// Haar-distributed angles: sin^2(chi) ~ U[0,1], phi, psi ~ U[0, 2pi).
// Density (1/4pi^2) sin(2 chi) dchi dphi dpsi.
AngleState haar_sample(std::mt19937_64& rng);

// The three control vector fields of the driven system, in (chi, phi, psi):
//   b0 = (0, 1, 0)
//   b1 = (sin phi,  2 cos phi / tan 2chi, -cos phi / sin 2chi)
//   b2 = (cos phi, -2 sin phi / tan 2chi,  sin phi / sin 2chi)
// Singular at chi in {0, pi/2}; throws std::domain_error there.
struct ControlFields {
    std::array<double, 3> b0, b1, b2;
};
ControlFields control_fields(const AngleState& a);

// det{b0, b1, b2} = -1/sin(2 chi), evaluated in closed form.
double control_fields_det(const AngleState& a);

// Max norm over the sample points of the residuals of the bracket identities
//   [A0,A1] - A2,  [A0,A2] + A1,  [A1,A2] - 4 A0,
// with Jacobians by central finite differences of step fd_step.
double verify_brackets(std::span<const AngleState> points, double fd_step);

} // namespace spinbath::su2
