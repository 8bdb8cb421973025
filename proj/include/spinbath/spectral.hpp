#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

namespace spinbath::spectral {

// Galerkin truncation of the generator L = L_Z + d_phi + i kappa L1 in the
// product basis h_n(Z) f_p(y) e^{i k phi} e^{i r psi}, with h_n the Hermite
// eigenfunctions of the OU generator (eigenvalues -n gamma) and
// f_p(y) = e^{i pi p y}/sqrt(2) the orthonormal Fourier family on [-1, 1].
// psi only enters through the conserved sector index r, so one block per r.
struct GalerkinSpec {
    int n_max = 6;        // Hermite levels 0..n_max
    int p_max = 8;        // y-basis indices 0, +-1, ..., +-p_max (interleaved)
    int k_max = 6;        // phi harmonics -k_max..k_max
    int r = 0;            // psi sector
    int quad_points = 512;

    void validate() const;
    int dim() const { return (n_max + 1) * (2 * p_max + 1) * (2 * k_max + 1); }
    std::vector<int> p_indices() const;  // [0, 1, -1, 2, -2, ...]
};

struct SpectrumResult {
    std::vector<std::complex<double>> eigenvalues;  // sorted by descending real part
    double gap = 0.0;              // -max{Re l : |l| > 1e-8, |Im l| <= im_cut}
    double zero_mode_error = 0.0;  // |l| of the eigenvalue closest to 0
    double im_cut = 0.0;           // imaginary-band cutoff used for the gap
};

// a_{q,p} = int_{-1}^1 conj(f_q) sqrt(1-y^2) f'_p dy, Gauss-Chebyshev (2nd kind).
std::complex<double> matrix_element_a(int q, int p, int quad_points);

// b_{q,p}(k,r) = int_{-1}^1 conj(f_q) (k y + r/2)/sqrt(1-y^2) f_p dy,
// Gauss-Chebyshev (1st kind); split internally as k*c_{q,p} + (r/2)*d_{q,p}.
std::complex<double> matrix_element_b(int q, int p, int k, int r, int quad_points);

// Precomputed element matrices over the interleaved p-index set.
struct ElementTables {
    std::vector<int> ps;
    Eigen::MatrixXcd a, c, d;
};
// Throws if doubling the quadrature size moves any element by more than 1e-8.
ElementTables compute_elements(int p_max, int quad_points);

// Dense block of L for the requested r sector. Hard cap dim <= 4000.
Eigen::MatrixXcd build_generator(const GalerkinSpec& spec, double gamma, double kappa,
                                 double sigma);

// All eigenvalues (LAPACK zgeev). The gap is measured inside the band
// |Im l| <= im_cut: states in the outermost phi harmonics |k| = k_max lack
// their coupling partners and sit spuriously close to the imaginary axis at
// every truncation, so the default cutoff k_max - 1/2 excludes them.
SpectrumResult spectrum(const Eigen::MatrixXcd& matrix, double im_cut);
SpectrumResult compute_spectrum(const GalerkinSpec& spec, double gamma, double kappa,
                                double sigma);

// Second-order perturbative real part of the eigenvalue branch ik attached to
// basis state (0, p, k, r):
//   Re l = -(kappa sigma)^2/(2(1+gamma^2)) sum_q |a_{q,p}+b_{q,p}(k,r)|^2
//                                                + |a_{q,p}-b_{q,p}(k,r)|^2,
// q truncated at |q| <= q_max. tail_estimate (optional) reports the change in
// the result between q_max/2 and q_max.
double perturbative_real_part(int p, int k, int r, const GalerkinSpec& spec, double gamma,
                              double kappa, double sigma, int q_max,
                              double* tail_estimate = nullptr);

// Degenerate second-order perturbation theory in the (n=0, k, r) subspace:
// the basis states share the unperturbed eigenvalue ik, so the second-order
// eigenvalues are those of the effective matrix
//   H = -kappa^2 s^2 [ (A+)^H A+ /(gamma - i) + (A-)^H A- /(gamma + i) ],
// A+- = a +- b(k,r), s^2 = sigma^2/(2 gamma). Its diagonal entries are exactly
// the single-mode formula above.
Eigen::MatrixXcd sector_effective_matrix(int k, int r, const GalerkinSpec& spec, double gamma,
                                         double kappa, double sigma);

// Gap predicted by degenerate perturbation theory: min over the resolved
// sectors |k| <= k_max - 1 of -Re(eigenvalues of H), invariant mode excluded.
double perturbative_gap(const GalerkinSpec& spec, double gamma, double kappa, double sigma);

struct GapStudyRow {
    double gamma, kappa_sigma, gap, tstar, gap_times_tstar;
};
std::vector<GapStudyRow> gap_scaling_study(std::span<const double> gammas, double kappa_sigma,
                                           const GalerkinSpec& spec);

} // namespace spinbath::spectral
