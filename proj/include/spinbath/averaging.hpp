#pragma once

#include <span>

#include "spinbath/noise.hpp"

namespace spinbath::averaging {

// Relaxation/exploration timescale T* = (1+gamma^2)/(kappa sigma)^2 v 1/gamma
// and the phase shift theta = arctan(gamma) of the effective diffusion.
struct EffectiveParams {
    double tstar;
    double theta;

    EffectiveParams(double gamma, double kappa, double sigma);
};

// Averaging corrector: ybar = y + kappa w with
//   w(z, y, phi) = (2 z / (1+gamma^2)) sqrt(1-y^2) (cos phi + gamma sin phi).
// w solves the homological equation 2 z sqrt(1-y^2) sin phi - gamma z dw/dz + dw/dphi = 0,
// which removes the O(kappa) oscillatory term from the y-equation.
double corrector_w(double z, double y, double phi, double gamma);

// ybar = y + kappa * w(z, y, phi).
double corrected_y(double y, double z, double phi, double gamma, double kappa);

struct YState {
    double y;     // 2 rho - 1 = -cos(2 chi), in [-1, 1]
    double ybar;  // corrected variable y + kappa w
};
YState make_ystate(double y, double z, double phi, double gamma, double kappa);

// Leading drift of the corrected variable: -(4 kappa^2 gamma/(1+gamma^2)) z^2 ybar.
double effective_drift(double z, double ybar, double gamma, double kappa);

// Leading diffusion coefficient: 2 kappa sigma sqrt((1-ybar^2)/(1+gamma^2)) cos(phi+theta).
// z enters only the O(kappa^2 sigma z) remainder, which is not modelled.
double effective_diffusion(double z, double ybar, double phi, double gamma, double kappa,
                           double sigma);

// Euler-Maruyama step of the idealized unit-rate diffusion
//   d ybar = -ybar dt + sqrt(1 - ybar^2) dW,
// clamped to [-1, 1] (the continuous process cannot exit; the discrete step can
// overshoot by O(dt)).
double effective_1d_step(double ybar, double dt, double gaussian_draw);

// Physical time per unit of rescaled time mapping the averaged dynamics onto
// the unit-rate diffusion; T*/2 makes the map exact at leading order. Exposed
// as a knob because the literature is ambiguous about the factor 2.
double default_time_rescale(const EffectiveParams& eff);

// Time-average process X_t = (2 gamma / sigma^2) (1/t) int_0^t Z_s^2 ds - 1,
// trapezoid on the stored grid, Z linearly interpolated at t. Requires
// 0 < t <= times.back().
double time_average_X(const noise::NoiseParams& params, std::span<const double> times,
                      std::span<const double> values, double t);
double time_average_X(const noise::NoiseParams& params, const noise::NoisePath& path, double t);

} // namespace spinbath::averaging
