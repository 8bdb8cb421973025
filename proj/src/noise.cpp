#include "spinbath/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "spinbath/rng.hpp"

namespace spinbath::noise {

void NoiseParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("noise: gamma must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("noise: sigma must be >= 0");
}

double sample_stationary(const NoiseParams& params, std::mt19937_64& rng) {
    params.validate();
    if (params.sigma == 0.0) return 0.0;
    std::normal_distribution<double> normal(0.0, 1.0);
    return std::sqrt(params.stationary_variance()) * normal(rng);
}

double ou_exact_step(double z, const NoiseParams& params, double dt, double gaussian_draw) {
    if (!(dt > 0.0)) throw std::invalid_argument("noise: dt must be > 0");
    const double decay = std::exp(-params.gamma * dt);
    const double var = params.sigma * params.sigma * (1.0 - decay * decay) / (2.0 * params.gamma);
    return z * decay + std::sqrt(var) * gaussian_draw;
}

OuStepper::OuStepper(const NoiseParams& params, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("noise: dt must be > 0");
    decay = std::exp(-params.gamma * dt);
    noise_std = std::sqrt(params.sigma * params.sigma * (1.0 - decay * decay) / (2.0 * params.gamma));
}

NoisePath sample_path(const NoiseParams& params, std::span<const double> grid, std::uint64_t seed) {
    params.validate();
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("noise: grid must be strictly increasing");

    NoisePath path;
    path.seed = seed;
    path.times.assign(grid.begin(), grid.end());
    path.values.reserve(grid.size());
    if (grid.empty()) return path;

    auto rng = rng::derive_stream(seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    double z = sample_stationary(params, rng);
    path.values.push_back(z);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        z = ou_exact_step(z, params, grid[i] - grid[i - 1], normal(rng));
        path.values.push_back(z);
    }
    return path;
}

OrnsteinUhlenbeck::OrnsteinUhlenbeck(NoiseParams params) : params_(params) { params_.validate(); }

double OrnsteinUhlenbeck::sample_stationary(std::mt19937_64& rng) const {
    return noise::sample_stationary(params_, rng);
}

double OrnsteinUhlenbeck::step(double z, double dt, std::mt19937_64& rng) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    return ou_exact_step(z, params_, dt, normal(rng));
}

} // namespace spinbath::noise
