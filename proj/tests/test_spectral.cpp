#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "spinbath/spectral.hpp"

using namespace spinbath;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

// Dense trapezoid oracle for the a-integral on a uniform 1e6-point grid.
cplx trapezoid_a(int q, int p, int n_pts) {
    const double h = 2.0 / n_pts;
    cplx sum = 0.0;
    for (int i = 0; i <= n_pts; ++i) {
        const double y = -1.0 + i * h;
        const cplx fq = std::exp(cplx(0.0, -pi * q * y)) / std::sqrt(2.0);
        const cplx dfp = cplx(0.0, pi * p) * std::exp(cplx(0.0, pi * p * y)) / std::sqrt(2.0);
        const double w = (i == 0 || i == n_pts) ? 0.5 : 1.0;
        sum += w * h * fq * std::sqrt(std::max(0.0, 1.0 - y * y)) * dfp;
    }
    return sum;
}

// Gauss-Hermite nodes/weights for the standard normal weight, via the Jacobi
// matrix of the probabilists' Hermite recurrence.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        jac(i, i - 1) = std::sqrt(static_cast<double>(i));
        jac(i - 1, i) = jac(i, i - 1);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jac);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        weights[i] = v0 * v0;  // weights of the normalized N(0,1) measure
    }
}

// Normalized Hermite eigenfunctions of the OU generator for N(0, s^2).
double hermite_h(int n, double z, double s) {
    const double u = z / s;
    double hm = 1.0, h = u;  // h_0, h_1 (normalized: He_n/sqrt(n!))
    if (n == 0) return 1.0;
    for (int k = 1; k < n; ++k) {
        const double next = (u * h - std::sqrt(static_cast<double>(k)) * hm) /
                            std::sqrt(static_cast<double>(k + 1));
        hm = h;
        h = next;
    }
    return h;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("spec validation: truncations, quadrature floor, dimension cap") {
    spectral::GalerkinSpec spec;
    spec.n_max = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = {};
    spec.quad_points = 3 * spec.p_max;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = {};
    spec.n_max = 20;
    spec.p_max = 20;
    spec.k_max = 20;
    spec.quad_points = 128;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    spec = {};
    CHECK(spec.dim() == 7 * 17 * 13);
    const auto ps = spec.p_indices();
    CHECK(ps[0] == 0);
    CHECK(ps[1] == 1);
    CHECK(ps[2] == -1);
    CHECK(ps.back() == -spec.p_max);
}

TEST_CASE("matrix_element_a: constant mode, trapezoid oracle, conjugation") {
    for (int q : {-3, 0, 2}) CHECK(std::abs(spectral::matrix_element_a(q, 0, 128)) == 0.0);

    const cplx a12 = spectral::matrix_element_a(1, 2, 256);
    CHECK(std::abs(a12 - trapezoid_a(1, 2, 1000000)) < 1e-8);

    for (const auto& [q, p] : {std::pair{1, 2}, std::pair{-2, 3}, std::pair{0, 1}}) {
        const cplx lhs = spectral::matrix_element_a(-q, -p, 256);
        const cplx rhs = std::conj(spectral::matrix_element_a(q, p, 256));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }

    // far-too-coarse quadrature is flagged rather than silently wrong
    CHECK_THROWS_AS(spectral::matrix_element_a(1, 8, 4), std::runtime_error);
}

TEST_CASE("matrix_element_b: zero mode, linearity in k, odd integrand") {
    for (int q : {-2, 0, 1})
        for (int p : {-1, 0, 3}) CHECK(std::abs(spectral::matrix_element_b(q, p, 0, 0, 128)) == 0.0);

    const cplx b1 = spectral::matrix_element_b(2, 1, 1, 0, 256);
    const cplx b2 = spectral::matrix_element_b(2, 1, 2, 0, 256);
    CHECK(std::abs(b2 - 2.0 * b1) < 1e-12);

    // (q,p,k,r) = (0,0,1,0): integrand y/sqrt(1-y^2)/2 is odd
    CHECK(std::abs(spectral::matrix_element_b(0, 0, 1, 0, 256)) < 1e-14);
}

TEST_CASE("Hermite ladder matches Gauss-Hermite quadrature") {
    const double gamma = 1.7, sigma = 0.6;
    const double s = sigma / std::sqrt(2.0 * gamma);
    std::vector<double> nodes, weights;
    gauss_hermite(40, nodes, weights);
    for (int m = 0; m <= 6; ++m)
        for (int n = 0; n <= 6; ++n) {
            double integral = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const double z = s * nodes[i];  // Z ~ N(0, s^2)
                integral += weights[i] * hermite_h(m, z, s) * z * hermite_h(n, z, s);
            }
            double expected = 0.0;
            if (m == n + 1) expected = s * std::sqrt(n + 1.0);
            if (m == n - 1) expected = s * std::sqrt(static_cast<double>(n));
            CHECK(std::abs(integral - expected) < 1e-8);
        }
}

TEST_CASE("build_generator: uncoupled diagonal, kernel column, vanishing first order") {
    spectral::GalerkinSpec spec;
    spec.n_max = 3;
    spec.p_max = 2;
    spec.k_max = 2;
    spec.quad_points = 64;
    const double gamma = 1.0;

    const auto L0 = spectral::build_generator(spec, gamma, 0.0, 0.1);
    const auto ps = spec.p_indices();
    const int P = static_cast<int>(ps.size()), K = 2 * spec.k_max + 1;
    for (int n = 0; n <= spec.n_max; ++n)
        for (int ip = 0; ip < P; ++ip)
            for (int ik = 0; ik < K; ++ik) {
                const int col = (n * P + ip) * K + ik;
                CHECK(L0(col, col) == cplx(-n * gamma, ik - spec.k_max));
            }
    Eigen::MatrixXcd off = L0;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);

    const auto L = spectral::build_generator(spec, gamma, 1.0, 0.1);
    // constants are invariant: the column of (n,p,k,r) = (0,0,0,0) vanishes
    const int kernel_col = (0 * P + 0) * K + spec.k_max;
    CHECK(L.col(kernel_col).cwiseAbs().maxCoeff() == 0.0);
    // the coupling never touches the diagonal (first-order correction vanishes)
    for (int c = 0; c < L.cols(); ++c) CHECK(L(c, c) == L0(c, c));
    // i kappa L1 with L1 self-adjoint: the off-diagonal part is anti-hermitian
    const Eigen::MatrixXcd coupling = L - L0;
    CHECK((coupling + coupling.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spectrum: uncoupled eigenvalue lattice with correct multiplicity") {
    spectral::GalerkinSpec spec;
    spec.n_max = 3;
    spec.p_max = 2;
    spec.k_max = 2;
    spec.quad_points = 64;
    const auto res =
        spectral::spectrum(spectral::build_generator(spec, 1.0, 0.0, 0.1), spec.k_max - 0.5);
    REQUIRE(static_cast<int>(res.eigenvalues.size()) == spec.dim());
    const int mult = 2 * spec.p_max + 1;
    for (int n = 0; n <= spec.n_max; ++n)
        for (int k = -spec.k_max; k <= spec.k_max; ++k) {
            int count = 0;
            for (const auto& ev : res.eigenvalues)
                if (std::abs(ev - cplx(-n, k)) < 1e-10) ++count;
            CHECK(count == mult);
        }
}

TEST_CASE("spectrum: simple kernel, left half-plane, conjugation pairing") {
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    const auto res = spectral::compute_spectrum(spec, 1.0, 1.0, 0.05);

    int near_zero = 0;
    for (const auto& ev : res.eigenvalues) {
        if (std::abs(ev) < 1e-8) ++near_zero;
        CHECK(ev.real() <= 1e-8);
    }
    CHECK(near_zero == 1);
    CHECK(res.zero_mode_error < 1e-8);

    for (const auto& ev : res.eigenvalues) {
        if (std::abs(ev.imag()) < 1e-8) continue;
        double best = 1.0;
        for (const auto& other : res.eigenvalues)
            best = std::min(best, std::abs(other - std::conj(ev)));
        CHECK(best < 1e-8);
    }

    // r != 0 sector has no invariant mode
    auto spec_r = spec;
    spec_r.r = 1;
    const auto res_r = spectral::compute_spectrum(spec_r, 1.0, 1.0, 0.05);
    CHECK(res_r.zero_mode_error > 1e-6);
}

TEST_CASE("gap is stable under truncation refinement") {
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    const double base = spectral::compute_spectrum(spec, 1.0, 1.0, 0.05).gap;
    for (const auto& [dn, dp, dk] : {std::tuple{8, 6, 4}, std::tuple{4, 12, 4}, std::tuple{4, 6, 8}}) {
        auto bigger = spec;
        bigger.n_max = dn;
        bigger.p_max = dp;
        bigger.k_max = dk;
        const double refined = spectral::compute_spectrum(bigger, 1.0, 1.0, 0.05).gap;
        CHECK(std::abs(refined - base) / base < 0.05);
    }
}

TEST_CASE("perturbative real parts: invariant mode, strict negativity, tails") {
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    CHECK(spectral::perturbative_real_part(0, 0, 0, spec, 1.0, 1.0, 0.01, 8) == 0.0);
    for (const auto& [p, k, r] :
         {std::tuple{1, 0, 0}, std::tuple{0, 1, 0}, std::tuple{2, 3, 0}, std::tuple{0, 0, 1}}) {
        double tail = -1.0;
        const double re =
            spectral::perturbative_real_part(p, k, r, spec, 1.0, 1.0, 0.01, 8, &tail);
        CHECK(re < 0.0);
        CHECK(tail >= 0.0);
    }
    // the k = 0 column sums converge as the q window grows
    double tail_small = 0.0, tail_large = 0.0;
    spectral::perturbative_real_part(1, 0, 0, spec, 1.0, 1.0, 0.01, 8, &tail_small);
    spectral::perturbative_real_part(1, 0, 0, spec, 1.0, 1.0, 0.01, 32, &tail_large);
    CHECK(tail_large < tail_small);
}

TEST_CASE("degenerate perturbation theory reproduces the Galerkin spectrum") {
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    const double gamma = 1.0, kappa = 1.0, sigma = 0.01;
    const auto galerkin = spectral::compute_spectrum(spec, gamma, kappa, sigma);

    // the diagonal of the effective matrix is the closed-form expression
    for (int k : {0, 1, 2}) {
        const auto h = spectral::sector_effective_matrix(k, 0, spec, gamma, kappa, sigma);
        const auto ps = spec.p_indices();
        for (std::size_t ip = 0; ip < ps.size(); ++ip) {
            const double direct = spectral::perturbative_real_part(
                ps[ip], k, 0, spec, gamma, kappa, sigma, spec.p_max);
            CHECK(h(ip, ip).real() == doctest::Approx(direct).epsilon(1e-10));
        }
    }

    // sector-by-sector: second-order eigenvalues track the near-axis Galerkin
    // eigenvalues mode by mode
    for (int k : {0, 1, 2, 3}) {
        const auto h = spectral::sector_effective_matrix(k, 0, spec, gamma, kappa, sigma);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, false);
        std::vector<double> pt_re;
        for (int i = 0; i < h.rows(); ++i) pt_re.push_back(solver.eigenvalues()(i).real());
        std::sort(pt_re.begin(), pt_re.end());

        std::vector<double> galerkin_re;
        for (const auto& ev : galerkin.eigenvalues)
            if (std::abs(ev.imag() - k) < 0.2 && ev.real() > -0.5) galerkin_re.push_back(ev.real());
        std::sort(galerkin_re.begin(), galerkin_re.end());
        REQUIRE(galerkin_re.size() == pt_re.size());
        for (std::size_t i = 0; i < pt_re.size(); ++i) {
            if (std::abs(pt_re[i]) < 1e-12) continue;  // invariant mode
            CHECK(std::abs(galerkin_re[i] - pt_re[i]) / std::abs(pt_re[i]) < 0.10);
        }
    }

    // and the predicted gap agrees with the measured one
    const double pt_gap = spectral::perturbative_gap(spec, gamma, kappa, sigma);
    CHECK(std::abs(pt_gap - galerkin.gap) / galerkin.gap < 0.10);
}

TEST_CASE("perturbative agreement improves as kappa*sigma shrinks") {
    // second-order accuracy: the relative mismatch between the Galerkin gap
    // and the perturbative prediction drops when kappa*sigma is halved
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    auto mismatch = [&](double ks) {
        const double gap = spectral::compute_spectrum(spec, 1.0, 1.0, ks).gap;
        const double pt = spectral::perturbative_gap(spec, 1.0, 1.0, ks);
        return std::abs(gap - pt) / pt;
    };
    const double coarse = mismatch(0.04);
    const double fine = mismatch(0.02);
    CHECK(fine < coarse);
}

TEST_CASE("gap scaling study: gamma-independent band and limiting regimes") {
    spectral::GalerkinSpec spec;
    spec.n_max = 4;
    spec.p_max = 6;
    spec.k_max = 4;
    spec.quad_points = 64;
    const std::vector<double> gammas{0.25, 1.0, 4.0};
    const auto rows = spectral::gap_scaling_study(gammas, 0.05, spec);
    REQUIRE(rows.size() == 3);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : rows) {
        CHECK(r.tstar == doctest::Approx(std::max((1.0 + r.gamma * r.gamma) / 0.0025, 1.0 / r.gamma)));
        lo = std::min(lo, r.gap_times_tstar);
        hi = std::max(hi, r.gap_times_tstar);
    }
    CHECK(hi / lo < 4.0);

    // slow-correlation regime: the gap collapses to Theta(gamma) << 1/T*(1)
    const auto slow = spectral::gap_scaling_study(std::vector<double>{1e-4}, 0.05, spec);
    CHECK(slow[0].gap > 0.3e-4);
    CHECK(slow[0].gap < 3.0e-4);
    CHECK(slow[0].gap < 0.3 * rows[1].gap);

    // fast-correlation regime: gap decays with gamma at least as fast as 1/gamma
    const auto fast = spectral::gap_scaling_study(std::vector<double>{4.0, 8.0}, 0.05, spec);
    CHECK(fast[1].gap < fast[0].gap);
    CHECK(fast[1].gap / fast[0].gap < 0.5);
}

} // TEST_SUITE
