#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spinbath/dynamics.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/stats.hpp"

using namespace spinbath;
using std::numbers::pi;

TEST_SUITE("dynamics") {

TEST_CASE("rhs: uncoupled value, orthogonality, linearity in the noise") {
    const auto d = dynamics::rhs_quaternion({0, 0, 0, 1}, 0.7, 0.0);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == -0.5);
    CHECK(d[3] == 0.0);

    auto rng = rng::derive_stream(41, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        su2::QuaternionState q{normal(rng), normal(rng), normal(rng), normal(rng)};
        q = q.normalized();
        const double z = normal(rng), kappa = std::abs(normal(rng));
        const auto f = dynamics::rhs_quaternion(q, z, kappa);
        // derivative orthogonal to the state: the flow is norm-preserving
        const double dot = q.x1 * f[0] + q.x2 * f[1] + q.x3 * f[2] + q.x4 * f[3];
        CHECK(std::abs(dot) < 1e-15 * (1.0 + std::abs(kappa * z)));

        const auto f0 = dynamics::rhs_quaternion(q, 0.0, kappa);
        const auto f1 = dynamics::rhs_quaternion(q, z, kappa);
        const auto f2 = dynamics::rhs_quaternion(q, 2.0 * z, kappa);
        for (int c = 0; c < 4; ++c)
            CHECK(f2[c] - f0[c] == doctest::Approx(2.0 * (f1[c] - f0[c])).epsilon(1e-12));
    }
}

TEST_CASE("step: uncoupled exactness, norm drift, step-halving order") {
    // kappa = 0: q(t) = (0, 0, -sin(t/2), cos(t/2))
    su2::QuaternionState q{};
    const double dt = 1e-3;
    for (int i = 0; i < 10000; ++i) q = dynamics::step(q, {0, 0, 0}, 0.0, dt);
    const double t = 10.0;
    CHECK(std::abs(q.x3 + std::sin(t / 2.0)) < 1e-8);
    CHECK(std::abs(q.x4 - std::cos(t / 2.0)) < 1e-8);
    CHECK(std::abs(q.x1) < 1e-12);
    CHECK(std::abs(q.x2) < 1e-12);

    // pre-renormalization norm drift under noise
    auto rng = rng::derive_stream(42, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const noise::NoiseParams np{1.0, 0.1};
    const noise::OuStepper half(np, dt / 2.0);
    su2::QuaternionState qr{};
    double z = noise::sample_stationary(np, rng);
    double drift = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double zm = half.step(z, normal(rng));
        const double z1 = half.step(zm, normal(rng));
        const auto raw = dynamics::step_unnormalized(qr, {z, zm, z1}, 1.0, dt);
        drift = std::max(drift, std::abs(raw.norm() - 1.0));
        qr = raw.normalized();
        z = z1;
    }
    CHECK(drift / 1.0 < 1e-9);  // over one unit of time

    // Richardson: one step of size h vs two of h/2 against h -> h/2 refinement
    auto deterministic_z = [](double tt) { return std::cos(tt); };
    auto do_step = [&](const su2::QuaternionState& s, double t0, double h) {
        return dynamics::step_unnormalized(
            s, {deterministic_z(t0), deterministic_z(t0 + h / 2.0), deterministic_z(t0 + h)}, 1.0,
            h);
    };
    auto error_at = [&](double h) {
        const su2::QuaternionState s{0.5, 0.5, 0.5, 0.5};
        const auto one = do_step(s, 0.0, h);
        auto two = do_step(s, 0.0, h / 2.0);
        two = do_step(two, h / 2.0, h / 2.0);
        return std::max({std::abs(one.x1 - two.x1), std::abs(one.x2 - two.x2),
                         std::abs(one.x3 - two.x3), std::abs(one.x4 - two.x4)});
    };
    // local error O(h^5) means the defect shrinks ~32x when h halves
    CHECK(error_at(0.05) / error_at(0.025) > 16.0);
}

TEST_CASE("transition probability") {
    CHECK(dynamics::transition_probability({0, 0, 0, 1}) == 0.0);
    CHECK(dynamics::transition_probability({0.6, 0.8, 0, 0}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(dynamics::transition_probability({1, 1, 1, 1}), std::invalid_argument);

    auto rng = rng::derive_stream(43, 0);
    const int n = 100000;
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i)
        rho[i] =
            dynamics::transition_probability(su2::angles_to_quaternion(su2::haar_sample(rng)));
    const auto s = stats::summarize(rho);
    CHECK(std::abs(s.mean - 0.5) < 3.0 * s.se());
}

TEST_CASE("simulate: uncoupled trajectory matches the diagonal solution") {
    dynamics::SimParams p;
    p.noise = {1.0, 0.1};
    p.kappa = 0.0;
    p.dt = 1e-3;
    p.t_final = 10.0;
    p.seed = 3;
    p.output_stride = 100;
    const auto tr = dynamics::simulate(p);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const double t = tr.times[i];
        CHECK(std::abs(tr.x3[i] + std::sin(t / 2.0)) < 1e-8);
        CHECK(std::abs(tr.x4[i] - std::cos(t / 2.0)) < 1e-8);
        CHECK(tr.rho[i] < 1e-16);
    }
}

TEST_CASE("stored trajectory states are normalized with rho in [0, 1]") {
    dynamics::SimParams p;
    p.noise = {1.0, 0.3};
    p.kappa = 1.0;
    p.dt = 0.01;
    p.t_final = 50.0;
    p.seed = 12;
    p.output_stride = 5;
    const auto tr = dynamics::simulate(p);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const su2::QuaternionState q{tr.x1[i], tr.x2[i], tr.x3[i], tr.x4[i]};
        CHECK(std::abs(q.norm() - 1.0) < 1e-9);
        CHECK(tr.rho[i] >= 0.0);
        CHECK(tr.rho[i] <= 1.0);
        CHECK(tr.rho[i] == doctest::Approx(std::sin(tr.chi[i]) * std::sin(tr.chi[i])));
    }
}

TEST_CASE("simulate: invariance under fixed kappa*sigma rescaling") {
    dynamics::SimParams a;
    a.noise = {1.0, 0.2};
    a.kappa = 1.0;
    a.dt = 0.01;
    a.t_final = 100.0;
    a.seed = 99;
    a.output_stride = 100;
    dynamics::SimParams b = a;
    b.noise.sigma = 0.4;
    b.kappa = 0.5;

    const auto ta = dynamics::simulate(a);
    const auto tb = dynamics::simulate(b);
    // kappa Z is identical draw by draw, so trajectories match bit for bit
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta.rho[i] == tb.rho[i]);
        CHECK(tb.z[i] == 2.0 * ta.z[i]);
    }
}

TEST_CASE("simulate: qualitative regimes of the two noise intensities") {
    // sigma = 0.03: T* ~ 2222, so by t = 1000 most paths have not yet crossed 1/2
    // sigma = 0.1:  T* = 200, so by t = 1000 most paths have explored up to rho ~ 1
    int stay_low = 0, explore = 0;
    const int n = 100;
    std::vector<int> low(n), high(n);
    parallel::parallel_for(n, [&](std::size_t i) {
        dynamics::SimParams p;
        p.noise = {1.0, 0.03};
        p.kappa = 1.0;
        p.dt = 0.01;
        p.t_final = 1000.0;
        p.seed = 1234;
        p.output_stride = 10;
        auto rng = rng::derive_stream(p.seed, i);
        const auto tr = dynamics::simulate(p, su2::QuaternionState{}, rng);
        low[i] = *std::max_element(tr.rho.begin(), tr.rho.end()) < 0.5;

        p.noise.sigma = 0.1;
        auto rng2 = rng::derive_stream(p.seed + 1, i);
        const auto tr2 = dynamics::simulate(p, su2::QuaternionState{}, rng2);
        high[i] = *std::max_element(tr2.rho.begin(), tr2.rho.end()) > 0.9;
    });
    for (int i = 0; i < n; ++i) {
        stay_low += low[i];
        explore += high[i];
    }
    CHECK(stay_low > 50);
    CHECK(explore > 50);
}

TEST_CASE("angle integrator agrees with the quaternion integrator") {
    dynamics::SimParams p;
    p.noise = {1.0, 0.1};
    p.kappa = 1.0;
    p.dt = 1e-3;
    p.t_final = 10.0;
    p.seed = 7;
    p.output_stride = 100;

    const su2::AngleState a0{pi / 4.0, 0.0, 0.0};
    auto rng_q = rng::derive_stream(p.seed, 0);
    auto rng_a = rng::derive_stream(p.seed, 0);
    const auto trq = dynamics::simulate(p, su2::angles_to_quaternion(a0), rng_q);
    const auto tra = dynamics::simulate_angles(p, a0, rng_a);

    REQUIRE(trq.size() == tra.size());
    for (std::size_t i = 0; i < trq.size(); ++i) {
        CHECK(trq.z[i] == tra.z[i]);  // identical noise consumption
        CHECK(std::abs(trq.chi[i] - tra.chi[i]) < 1e-6);
        // phi reduced mod 2pi in the quaternion chart, unwrapped in the angle one
        CHECK(std::abs(std::exp(std::complex<double>(0, trq.phi[i])) -
                       std::exp(std::complex<double>(0, tra.phi[i]))) < 1e-6);
        // psi defined mod pi on the twisted torus
        CHECK(std::abs(std::exp(std::complex<double>(0, 2.0 * trq.psi[i])) -
                       std::exp(std::complex<double>(0, 2.0 * tra.psi[i]))) < 1e-6);
    }
}

TEST_CASE("angle integrator: uncoupled flow and singularity abort") {
    dynamics::SimParams p;
    p.noise = {1.0, 0.1};
    p.kappa = 0.0;
    p.dt = 1e-3;
    p.t_final = 10.0;
    p.seed = 8;
    p.output_stride = 1000;
    auto rng = rng::derive_stream(p.seed, 0);
    const su2::AngleState a0{0.6, 0.25, 1.1};
    const auto tr = dynamics::simulate_angles(p, a0, rng);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(tr.chi[i] == a0.chi);
        CHECK(tr.psi[i] == a0.psi);
        CHECK(std::abs(tr.phi[i] - (a0.phi + tr.times[i])) < 1e-9);
    }

    p.kappa = 1.0;
    auto rng2 = rng::derive_stream(p.seed, 1);
    CHECK_THROWS_AS(dynamics::simulate_angles(p, {4e-4, 0.0, 0.0}, rng2),
                    dynamics::singularity_error);
}

TEST_CASE("haar + stationary start keeps rho uniform") {
    const int n = 2000;
    std::vector<double> rho(n);
    parallel::parallel_for(n, [&](std::size_t i) {
        dynamics::SimParams p;
        p.noise = {1.0, 0.1};
        p.kappa = 1.0;
        p.dt = 0.01;
        p.t_final = 5.0;
        p.seed = 4321;
        p.output_stride = 500;
        auto rng = rng::derive_stream(p.seed, i);
        const auto q0 = su2::angles_to_quaternion(su2::haar_sample(rng));
        rho[i] = dynamics::simulate(p, q0, rng).rho.back();
    });
    CHECK(stats::ks_uniform(rho).p_value > 0.01);
}

TEST_CASE("unitarity drift across the parameter grid") {
    for (const auto& [gamma, kappa, sigma] :
         {std::tuple{1.0, 1.0, 0.1}, std::tuple{4.0, 2.0, 0.3}, std::tuple{0.25, 0.5, 0.05}}) {
        const noise::NoiseParams np{gamma, sigma};
        const double dt = 1e-3;
        const noise::OuStepper half(np, dt / 2.0);
        auto rng = rng::derive_stream(44, 0);
        std::normal_distribution<double> normal(0.0, 1.0);
        su2::QuaternionState q{};
        double z = noise::sample_stationary(np, rng);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double zm = half.step(z, normal(rng));
            const double z1 = half.step(zm, normal(rng));
            const auto raw = dynamics::step_unnormalized(q, {z, zm, z1}, kappa, dt);
            worst = std::max(worst, std::abs(raw.norm() - 1.0));
            q = raw.normalized();
            z = z1;
        }
        CHECK(worst < 1e-9);  // per unit time, over t in [0, 10]
    }
}

TEST_CASE("parameter validation") {
    dynamics::SimParams p;
    p.noise = {1.0, 0.1};
    p.dt = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.dt = 0.01;
    p.t_final = 0.001;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.t_final = 1.0;
    p.kappa = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

} // TEST_SUITE
