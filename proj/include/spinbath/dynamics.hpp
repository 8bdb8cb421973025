#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "spinbath/noise.hpp"
#include "spinbath/su2.hpp"

namespace spinbath::dynamics {

struct SimParams {
    noise::NoiseParams noise;
    double kappa = 1.0;        // coupling strength, >= 0
    double dt = 1e-3;          // integration step; accuracy regime dt <= 0.1
    double t_final = 100.0;    // horizon, >= dt
    std::uint64_t seed = 0;
    std::size_t output_stride = 1;  // store every stride-th step

    void validate() const;
};

// Stored time series for one noise realisation. rho = x1^2 + x2^2 = sin^2(chi)
// is the spin-flip transition probability for that realisation.
struct Trajectory {
    std::vector<double> times, z;
    std::vector<double> x1, x2, x3, x4;
    std::vector<double> chi, phi, psi;
    std::vector<double> rho;

    std::size_t size() const { return times.size(); }
    void reserve(std::size_t n);
};

// Angle-representation series (phi, psi unwrapped, not reduced to the torus).
struct AngleTrajectory {
    std::vector<double> times, z, chi, phi, psi;
    std::size_t size() const { return times.size(); }
};

// Thrown by the angle integrator when |sin 2chi| < 1e-3.
struct singularity_error : std::runtime_error {
    double time;
    explicit singularity_error(double t);
};

// Right-hand side of the quaternion equation with real noise X_t = z:
//   dx1 = [-x2/2 - kappa z x4] dt, dx2 = [ x1/2 - kappa z x3] dt,
//   dx3 = [-x4/2 + kappa z x2] dt, dx4 = [ x3/2 + kappa z x1] dt.
// The field is skew (orthogonal to x), so the norm is conserved exactly.
std::array<double, 4> rhs_quaternion(const su2::QuaternionState& q, double z, double kappa);

// One classical RK4 step over [t, t+dt]; the random ODE uses exactly-sampled
// noise at the substep times, z_seg = {Z(t), Z(t+dt/2), Z(t+dt)}.
su2::QuaternionState step_unnormalized(const su2::QuaternionState& q,
                                       const std::array<double, 3>& z_seg, double kappa,
                                       double dt);
su2::QuaternionState step(const su2::QuaternionState& q, const std::array<double, 3>& z_seg,
                          double kappa, double dt);

// rho = x1^2 + x2^2 = |<+|U|->|^2 for normalized q.
double transition_probability(const su2::QuaternionState& q);

// Integrate from U_0 = identity with Z_0 stationary, RNG stream (seed, 0).
Trajectory simulate(const SimParams& params);

// Integrate from an arbitrary start; Z_0 is drawn from the stationary law
// unless z0 forces it. The caller owns the RNG stream (ensembles pass
// rng::derive_stream(seed, path_index)).
Trajectory simulate(const SimParams& params, const su2::QuaternionState& q0,
                    std::mt19937_64& rng, std::optional<double> z0 = std::nullopt);

// Direct integration of the (chi, phi, psi) system; diagnostic cross-check for
// the quaternion integrator. Consumes noise draws in the same order as
// simulate(), so identical streams give identical Z paths. Aborts with
// singularity_error near chi in {0, pi/2}.
AngleTrajectory simulate_angles(const SimParams& params, const su2::AngleState& a0,
                                std::mt19937_64& rng, std::optional<double> z0 = std::nullopt);

} // namespace spinbath::dynamics
