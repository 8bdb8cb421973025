#include "spinbath/dynamics.hpp"

#include <cmath>
#include <string>

#include "spinbath/rng.hpp"

namespace spinbath::dynamics {

void SimParams::validate() const {
    noise.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("dynamics: dt must be > 0");
    if (!(t_final >= dt)) throw std::invalid_argument("dynamics: t_final must be >= dt");
    if (!(kappa >= 0.0)) throw std::invalid_argument("dynamics: kappa must be >= 0");
    if (output_stride == 0) throw std::invalid_argument("dynamics: output_stride must be >= 1");
}

void Trajectory::reserve(std::size_t n) {
    times.reserve(n);
    z.reserve(n);
    x1.reserve(n);
    x2.reserve(n);
    x3.reserve(n);
    x4.reserve(n);
    chi.reserve(n);
    phi.reserve(n);
    psi.reserve(n);
    rho.reserve(n);
}

singularity_error::singularity_error(double t)
    : std::runtime_error("dynamics: angle representation singular near t = " + std::to_string(t)),
      time(t) {}

std::array<double, 4> rhs_quaternion(const su2::QuaternionState& q, double z, double kappa) {
    const double kz = kappa * z;
    return {-0.5 * q.x2 - kz * q.x4, 0.5 * q.x1 - kz * q.x3, -0.5 * q.x4 + kz * q.x2,
            0.5 * q.x3 + kz * q.x1};
}

namespace {

su2::QuaternionState advance(const su2::QuaternionState& q, const std::array<double, 4>& k,
                             double h) {
    return {q.x1 + h * k[0], q.x2 + h * k[1], q.x3 + h * k[2], q.x4 + h * k[3]};
}

} // namespace

su2::QuaternionState step_unnormalized(const su2::QuaternionState& q,
                                       const std::array<double, 3>& z_seg, double kappa,
                                       double dt) {
    const auto k1 = rhs_quaternion(q, z_seg[0], kappa);
    const auto k2 = rhs_quaternion(advance(q, k1, dt / 2.0), z_seg[1], kappa);
    const auto k3 = rhs_quaternion(advance(q, k2, dt / 2.0), z_seg[1], kappa);
    const auto k4 = rhs_quaternion(advance(q, k3, dt), z_seg[2], kappa);
    return {q.x1 + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            q.x2 + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            q.x3 + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            q.x4 + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])};
}

su2::QuaternionState step(const su2::QuaternionState& q, const std::array<double, 3>& z_seg,
                          double kappa, double dt) {
    return step_unnormalized(q, z_seg, kappa, dt).normalized();
}

double transition_probability(const su2::QuaternionState& q) {
    if (std::abs(q.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("dynamics: transition_probability needs a normalized state");
    const double rho = q.x1 * q.x1 + q.x2 * q.x2;
    return rho < 0.0 ? 0.0 : rho > 1.0 ? 1.0 : rho;
}

namespace {

void record(Trajectory& out, double t, double z, const su2::QuaternionState& q) {
    out.times.push_back(t);
    out.z.push_back(z);
    out.x1.push_back(q.x1);
    out.x2.push_back(q.x2);
    out.x3.push_back(q.x3);
    out.x4.push_back(q.x4);
    const auto a = su2::quaternion_to_angles(q);
    out.chi.push_back(a.chi);
    out.phi.push_back(a.phi);
    out.psi.push_back(a.psi);
    out.rho.push_back(q.x1 * q.x1 + q.x2 * q.x2);
}

} // namespace

Trajectory simulate(const SimParams& params) {
    auto rng = rng::derive_stream(params.seed, 0);
    return simulate(params, su2::QuaternionState{}, rng);
}

Trajectory simulate(const SimParams& params, const su2::QuaternionState& q0,
                    std::mt19937_64& rng, std::optional<double> z0) {
    params.validate();
    const auto n_steps = static_cast<std::size_t>(std::llround(params.t_final / params.dt));
    const noise::OuStepper half(params.noise, params.dt / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    Trajectory out;
    out.reserve(n_steps / params.output_stride + 2);

    su2::QuaternionState q = q0.normalized();
    double z = z0 ? *z0 : noise::sample_stationary(params.noise, rng);
    record(out, 0.0, z, q);

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double zm = half.step(z, normal(rng));
        const double z1 = half.step(zm, normal(rng));
        q = step(q, {z, zm, z1}, params.kappa, params.dt);
        z = z1;
        if ((i + 1) % params.output_stride == 0 || i + 1 == n_steps)
            record(out, (i + 1) * params.dt, z, q);
    }
    return out;
}

namespace {

std::array<double, 3> rhs_angles(const std::array<double, 3>& a, double z, double kappa,
                                 double t) {
    const double s2 = std::sin(2.0 * a[0]);
    if (std::abs(s2) < 1e-3) throw singularity_error(t);
    const double cot2 = std::cos(2.0 * a[0]) / s2;
    const double kzc = kappa * z * std::cos(a[1]);
    return {kappa * z * std::sin(a[1]), 1.0 + 2.0 * kzc * cot2, -kzc / s2};
}

} // namespace

AngleTrajectory simulate_angles(const SimParams& params, const su2::AngleState& a0,
                                std::mt19937_64& rng, std::optional<double> z0) {
    params.validate();
    const auto n_steps = static_cast<std::size_t>(std::llround(params.t_final / params.dt));
    const noise::OuStepper half(params.noise, params.dt / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    AngleTrajectory out;
    const std::size_t cap = n_steps / params.output_stride + 2;
    out.times.reserve(cap);
    out.z.reserve(cap);
    out.chi.reserve(cap);
    out.phi.reserve(cap);
    out.psi.reserve(cap);

    std::array<double, 3> a = {a0.chi, a0.phi, a0.psi};
    double z = z0 ? *z0 : noise::sample_stationary(params.noise, rng);
    auto push = [&](double t) {
        out.times.push_back(t);
        out.z.push_back(z);
        out.chi.push_back(a[0]);
        out.phi.push_back(a[1]);
        out.psi.push_back(a[2]);
    };
    push(0.0);

    const double dt = params.dt;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t = i * dt;
        const double zm = half.step(z, normal(rng));
        const double z1 = half.step(zm, normal(rng));
        const auto k1 = rhs_angles(a, z, params.kappa, t);
        const auto a2 = std::array<double, 3>{a[0] + dt / 2 * k1[0], a[1] + dt / 2 * k1[1],
                                              a[2] + dt / 2 * k1[2]};
        const auto k2 = rhs_angles(a2, zm, params.kappa, t + dt / 2);
        const auto a3 = std::array<double, 3>{a[0] + dt / 2 * k2[0], a[1] + dt / 2 * k2[1],
                                              a[2] + dt / 2 * k2[2]};
        const auto k3 = rhs_angles(a3, zm, params.kappa, t + dt / 2);
        const auto a4 =
            std::array<double, 3>{a[0] + dt * k3[0], a[1] + dt * k3[1], a[2] + dt * k3[2]};
        const auto k4 = rhs_angles(a4, z1, params.kappa, t + dt);
        for (int c = 0; c < 3; ++c)
            a[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        z = z1;
        if ((i + 1) % params.output_stride == 0 || i + 1 == n_steps) push((i + 1) * dt);
    }
    return out;
}

} // namespace spinbath::dynamics
