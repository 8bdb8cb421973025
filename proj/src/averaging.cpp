#include "spinbath/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinbath::averaging {

EffectiveParams::EffectiveParams(double gamma, double kappa, double sigma) {
    if (!(gamma > 0.0) || !(kappa * sigma > 0.0))
        throw std::invalid_argument("averaging: need gamma > 0 and kappa*sigma > 0");
    const double ks = kappa * sigma;
    tstar = std::max((1.0 + gamma * gamma) / (ks * ks), 1.0 / gamma);
    theta = std::atan(gamma);
}

double corrector_w(double z, double y, double phi, double gamma) {
    if (std::abs(y) > 1.0) throw std::invalid_argument("averaging: |y| must be <= 1");
    return 2.0 * z / (1.0 + gamma * gamma) * std::sqrt(1.0 - y * y) *
           (std::cos(phi) + gamma * std::sin(phi));
}

double corrected_y(double y, double z, double phi, double gamma, double kappa) {
    return y + kappa * corrector_w(z, y, phi, gamma);
}

YState make_ystate(double y, double z, double phi, double gamma, double kappa) {
    return {y, corrected_y(y, z, phi, gamma, kappa)};
}

double effective_drift(double z, double ybar, double gamma, double kappa) {
    if (std::abs(ybar) > 1.0) throw std::invalid_argument("averaging: |ybar| must be <= 1");
    return -4.0 * kappa * kappa * gamma / (1.0 + gamma * gamma) * z * z * ybar;
}

double effective_diffusion(double /*z*/, double ybar, double phi, double gamma, double kappa,
                           double sigma) {
    if (std::abs(ybar) > 1.0) throw std::invalid_argument("averaging: |ybar| must be <= 1");
    const double theta = std::atan(gamma);
    return 2.0 * kappa * sigma * std::sqrt((1.0 - ybar * ybar) / (1.0 + gamma * gamma)) *
           std::cos(phi + theta);
}

double effective_1d_step(double ybar, double dt, double gaussian_draw) {
    if (std::abs(ybar) > 1.0) throw std::invalid_argument("averaging: |ybar| must be <= 1");
    const double diff = std::sqrt(std::max(0.0, 1.0 - ybar * ybar));
    const double next = ybar - ybar * dt + diff * std::sqrt(dt) * gaussian_draw;
    return std::clamp(next, -1.0, 1.0);
}

double default_time_rescale(const EffectiveParams& eff) { return eff.tstar / 2.0; }

double time_average_X(const noise::NoiseParams& params, std::span<const double> times,
                      std::span<const double> values, double t) {
    params.validate();
    if (!(t > 0.0)) throw std::invalid_argument("averaging: t must be > 0");
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("averaging: need at least two grid points");
    if (times.front() != 0.0)
        throw std::invalid_argument("averaging: the stored grid must start at t = 0");
    if (t > times.back() + 1e-12) throw std::invalid_argument("averaging: t beyond stored grid");

    double integral = 0.0;
    double prev_t = times[0];
    double prev_z2 = values[0] * values[0];
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] >= t) {
            // partial last interval, Z linearly interpolated at t
            const double f = (t - prev_t) / (times[i] - times[i - 1]);
            const double zt = values[i - 1] + f * (values[i] - values[i - 1]);
            integral += 0.5 * (prev_z2 + zt * zt) * (t - prev_t);
            prev_t = t;
            break;
        }
        const double z2 = values[i] * values[i];
        integral += 0.5 * (prev_z2 + z2) * (times[i] - prev_t);
        prev_t = times[i];
        prev_z2 = z2;
    }
    return 2.0 * params.gamma / (params.sigma * params.sigma) * integral / t - 1.0;
}

double time_average_X(const noise::NoiseParams& params, const noise::NoisePath& path, double t) {
    return time_average_X(params, path.times, path.values, t);
}

} // namespace spinbath::averaging
