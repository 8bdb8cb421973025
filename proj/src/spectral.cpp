#include "spinbath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace spinbath::spectral {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double zero_tol = 1e-8;  // |lambda| below this counts as the invariant mode

using cplx = std::complex<double>;

// Gauss-Chebyshev rules. Second kind integrates g against sqrt(1-y^2) dy,
// first kind against 1/sqrt(1-y^2) dy; both absorb the endpoint behaviour of
// the weight exactly.
struct QuadRule {
    std::vector<double> nodes, weights;
};

QuadRule cheb2(int n) {
    QuadRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double s = std::sin(i * pi / (n + 1));
        q.nodes[i - 1] = std::cos(i * pi / (n + 1));
        q.weights[i - 1] = pi / (n + 1) * s * s;
    }
    return q;
}

QuadRule cheb1(int n) {
    QuadRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 1; i <= n; ++i) {
        q.nodes[i - 1] = std::cos((2.0 * i - 1.0) * pi / (2.0 * n));
        q.weights[i - 1] = pi / n;
    }
    return q;
}

cplx basis_f(int p, double y) { return std::exp(cplx(0.0, pi * p * y)) / std::sqrt(2.0); }

cplx element_a(int q, int p, const QuadRule& rule) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = rule.nodes[i];
        const cplx fq = std::conj(basis_f(q, y));
        const cplx dfp = cplx(0.0, pi * p) * basis_f(p, y);
        sum += rule.weights[i] * fq * dfp;
    }
    return sum;
}

cplx element_c(int q, int p, const QuadRule& rule) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = rule.nodes[i];
        sum += rule.weights[i] * std::conj(basis_f(q, y)) * y * basis_f(p, y);
    }
    return sum;
}

cplx element_d(int q, int p, const QuadRule& rule) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double y = rule.nodes[i];
        sum += rule.weights[i] * std::conj(basis_f(q, y)) * basis_f(p, y);
    }
    return sum;
}

ElementTables tables_at(const std::vector<int>& ps, int quad) {
    ElementTables t;
    t.ps = ps;
    const int P = static_cast<int>(ps.size());
    t.a.resize(P, P);
    t.c.resize(P, P);
    t.d.resize(P, P);
    const QuadRule r2 = cheb2(quad), r1 = cheb1(quad);
    for (int iq = 0; iq < P; ++iq)
        for (int ip = 0; ip < P; ++ip) {
            t.a(iq, ip) = element_a(ps[iq], ps[ip], r2);
            t.c(iq, ip) = element_c(ps[iq], ps[ip], r1);
            t.d(iq, ip) = element_d(ps[iq], ps[ip], r1);
        }
    return t;
}

std::vector<cplx> eig_zgeev(Eigen::MatrixXcd a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    std::vector<cplx> w(n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, w.data(),
                                          nullptr, 1, nullptr, 1);
    if (info != 0) throw std::runtime_error("spectral: zgeev failed, info = " + std::to_string(info));
    return w;
}

} // namespace

void GalerkinSpec::validate() const {
    if (n_max < 1 || p_max < 1 || k_max < 1)
        throw std::invalid_argument("spectral: truncations must be >= 1");
    if (quad_points < 4 * p_max)
        throw std::invalid_argument("spectral: quad_points must be >= 4*p_max");
    if (dim() > 4000) throw std::invalid_argument("spectral: matrix dimension exceeds 4000");
}

std::vector<int> GalerkinSpec::p_indices() const {
    std::vector<int> ps{0};
    for (int j = 1; j <= p_max; ++j) {
        ps.push_back(j);
        ps.push_back(-j);
    }
    return ps;
}

std::complex<double> matrix_element_a(int q, int p, int quad_points) {
    const cplx coarse = element_a(q, p, cheb2(quad_points));
    const cplx fine = element_a(q, p, cheb2(2 * quad_points));
    if (std::abs(fine - coarse) > 1e-8)
        throw std::runtime_error("spectral: quadrature for a_{q,p} did not converge");
    return fine;
}

std::complex<double> matrix_element_b(int q, int p, int k, int r, int quad_points) {
    const QuadRule rule = cheb1(quad_points), rule2 = cheb1(2 * quad_points);
    const cplx coarse = static_cast<double>(k) * element_c(q, p, rule) + 0.5 * r * element_d(q, p, rule);
    const cplx fine = static_cast<double>(k) * element_c(q, p, rule2) + 0.5 * r * element_d(q, p, rule2);
    if (std::abs(fine - coarse) > 1e-8)
        throw std::runtime_error("spectral: quadrature for b_{q,p} did not converge");
    return fine;
}

ElementTables compute_elements(int p_max, int quad_points) {
    std::vector<int> ps{0};
    for (int j = 1; j <= p_max; ++j) {
        ps.push_back(j);
        ps.push_back(-j);
    }
    ElementTables coarse = tables_at(ps, quad_points);
    ElementTables fine = tables_at(ps, 2 * quad_points);
    const double err = std::max({(fine.a - coarse.a).cwiseAbs().maxCoeff(),
                                 (fine.c - coarse.c).cwiseAbs().maxCoeff(),
                                 (fine.d - coarse.d).cwiseAbs().maxCoeff()});
    if (err > 1e-8) throw std::runtime_error("spectral: element quadrature did not converge");
    return fine;
}

Eigen::MatrixXcd build_generator(const GalerkinSpec& spec, double gamma, double kappa,
                                 double sigma) {
    spec.validate();
    if (!(gamma > 0.0)) throw std::invalid_argument("spectral: gamma must be > 0");
    const ElementTables t = compute_elements(spec.p_max, spec.quad_points);
    const int P = static_cast<int>(t.ps.size());
    const int K = 2 * spec.k_max + 1;
    const int dim = spec.dim();
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dim, dim);

    const double s = sigma / std::sqrt(2.0 * gamma);  // Z-ladder scale <1|Z|0>
    auto idx = [&](int n, int ip, int ik) { return (n * P + ip) * K + ik; };

    for (int n = 0; n <= spec.n_max; ++n)
        for (int ip = 0; ip < P; ++ip)
            for (int ik = 0; ik < K; ++ik) {
                const int k = ik - spec.k_max;
                const int col = idx(n, ip, ik);
                L(col, col) = cplx(-n * gamma, k);
                if (kappa == 0.0 || sigma == 0.0) continue;
                // i kappa L1 with L1 = Z (x) M: Z h_n = s(sqrt(n+1) h_{n+1} + sqrt(n) h_{n-1}),
                // M couples the phi harmonic k to k+-1 with y-elements -(a+b) and (a-b).
                for (const auto& [m, ladder] :
                     {std::pair{n + 1, s * std::sqrt(n + 1.0)}, std::pair{n - 1, s * std::sqrt(double(n))}}) {
                    if (m < 0 || m > spec.n_max) continue;
                    for (int iq = 0; iq < P; ++iq) {
                        const cplx b = static_cast<double>(k) * t.c(iq, ip) + 0.5 * spec.r * t.d(iq, ip);
                        if (ik + 1 < K)
                            L(idx(m, iq, ik + 1), col) += cplx(0.0, kappa) * ladder * (-(t.a(iq, ip) + b));
                        if (ik - 1 >= 0)
                            L(idx(m, iq, ik - 1), col) += cplx(0.0, kappa) * ladder * (t.a(iq, ip) - b);
                    }
                }
            }
    return L;
}

SpectrumResult spectrum(const Eigen::MatrixXcd& matrix, double im_cut) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw std::invalid_argument("spectral: matrix must be square and nonempty");
    if (!matrix.allFinite()) throw std::invalid_argument("spectral: matrix has non-finite entries");

    SpectrumResult out;
    out.im_cut = im_cut;
    out.eigenvalues = eig_zgeev(matrix);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const cplx& a, const cplx& b) { return a.real() > b.real(); });

    out.zero_mode_error = std::abs(out.eigenvalues.front());
    double max_re = -std::numeric_limits<double>::infinity();
    for (const cplx& ev : out.eigenvalues) {
        out.zero_mode_error = std::min(out.zero_mode_error, std::abs(ev));
        if (std::abs(ev) > zero_tol && std::abs(ev.imag()) <= im_cut)
            max_re = std::max(max_re, ev.real());
    }
    out.gap = -max_re;
    return out;
}

SpectrumResult compute_spectrum(const GalerkinSpec& spec, double gamma, double kappa,
                                double sigma) {
    return spectrum(build_generator(spec, gamma, kappa, sigma), spec.k_max - 0.5);
}

double perturbative_real_part(int p, int k, int r, const GalerkinSpec& spec, double gamma,
                              double kappa, double sigma, int q_max, double* tail_estimate) {
    if (q_max < 1) throw std::invalid_argument("spectral: q_max must be >= 1");
    const QuadRule r2 = cheb2(spec.quad_points), r1 = cheb1(spec.quad_points);
    auto partial = [&](int qm) {
        double sum = 0.0;
        for (int q = -qm; q <= qm; ++q) {
            const cplx a = element_a(q, p, r2);
            const cplx b = static_cast<double>(k) * element_c(q, p, r1) + 0.5 * r * element_d(q, p, r1);
            sum += std::norm(a + b) + std::norm(a - b);
        }
        return sum;
    };
    const double pref = kappa * sigma * kappa * sigma / (2.0 * (1.0 + gamma * gamma));
    const double full = partial(q_max);
    if (tail_estimate) *tail_estimate = pref * std::abs(full - partial(std::max(1, q_max / 2)));
    return -pref * full;
}

Eigen::MatrixXcd sector_effective_matrix(int k, int r, const GalerkinSpec& spec, double gamma,
                                         double kappa, double sigma) {
    const ElementTables t = compute_elements(spec.p_max, spec.quad_points);
    const Eigen::MatrixXcd b = static_cast<double>(k) * t.c + 0.5 * r * t.d;
    const Eigen::MatrixXcd ap = t.a + b, am = t.a - b;
    const double s2 = sigma * sigma / (2.0 * gamma);
    const cplx wp = 1.0 / cplx(gamma, -1.0), wm = 1.0 / cplx(gamma, 1.0);
    return -kappa * kappa * s2 *
           (wp * (ap.adjoint() * ap) + wm * (am.adjoint() * am));
}

double perturbative_gap(const GalerkinSpec& spec, double gamma, double kappa, double sigma) {
    spec.validate();
    double max_re = -std::numeric_limits<double>::infinity();
    const double scale = kappa * sigma * kappa * sigma / (1.0 + gamma * gamma);
    for (int k = -(spec.k_max - 1); k <= spec.k_max - 1; ++k) {
        const Eigen::MatrixXcd h = sector_effective_matrix(k, spec.r, spec, gamma, kappa, sigma);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, false);
        for (int i = 0; i < h.rows(); ++i) {
            const cplx ev = solver.eigenvalues()(i);
            if (std::abs(ev) < 1e-10 * scale) continue;  // invariant mode (k=0, p=0)
            max_re = std::max(max_re, ev.real());
        }
    }
    return -max_re;
}

std::vector<GapStudyRow> gap_scaling_study(std::span<const double> gammas, double kappa_sigma,
                                           const GalerkinSpec& spec) {
    if (!(kappa_sigma > 0.0)) throw std::invalid_argument("spectral: kappa_sigma must be > 0");
    std::vector<GapStudyRow> rows;
    rows.reserve(gammas.size());
    for (double g : gammas) {
        const auto res = compute_spectrum(spec, g, 1.0, kappa_sigma);
        const double tstar =
            std::max((1.0 + g * g) / (kappa_sigma * kappa_sigma), 1.0 / g);
        rows.push_back({g, kappa_sigma, res.gap, tstar, res.gap * tstar});
    }
    return rows;
}

} // namespace spinbath::spectral
