#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace spinbath::noise {

// Ornstein-Uhlenbeck driving noise dZ = -gamma Z dt + sigma dW,
// stationary law N(0, sigma^2/(2 gamma)).
struct NoiseParams {
    double gamma = 1.0;  // correlation decay rate, > 0
    double sigma = 0.1;  // noise intensity, >= 0

    double stationary_variance() const { return sigma * sigma / (2.0 * gamma); }
    void validate() const;
};

struct NoisePath {
    std::vector<double> times;   // strictly increasing
    std::vector<double> values;  // Z at each grid time
    std::uint64_t seed = 0;
};

// One draw from the stationary law N(0, sigma^2/2gamma).
double sample_stationary(const NoiseParams& params, std::mt19937_64& rng);

// Exact one-step transition: z' = z e^{-gamma dt} + sqrt(sigma^2 (1 - e^{-2 gamma dt})/(2 gamma)) xi.
// The step is distributionally exact for any dt > 0.
double ou_exact_step(double z, const NoiseParams& params, double dt, double gaussian_draw);

// Precomputed transition coefficients for a fixed step size (hot loops).
struct OuStepper {
    double decay;
    double noise_std;

    OuStepper(const NoiseParams& params, double dt);
    double step(double z, double gaussian_draw) const { return z * decay + noise_std * gaussian_draw; }
};

// Sample Z on the given grid, starting from the stationary law. Deterministic
// in (params, grid, seed). Rejects non-monotone grids.
NoisePath sample_path(const NoiseParams& params, std::span<const double> grid, std::uint64_t seed);

// Extension point for non-OU stationary noises (general drift/diffusion in the
// driving SDE). Only the OU model ships; downstream code holds NoiseParams
// directly in the hot paths.
class StationaryNoise {
  public:
    virtual ~StationaryNoise() = default;
    virtual double sample_stationary(std::mt19937_64& rng) const = 0;
    // One-step transition over dt; exact when the model admits it.
    virtual double step(double z, double dt, std::mt19937_64& rng) const = 0;
};

class OrnsteinUhlenbeck final : public StationaryNoise {
  public:
    explicit OrnsteinUhlenbeck(NoiseParams params);
    double sample_stationary(std::mt19937_64& rng) const override;
    double step(double z, double dt, std::mt19937_64& rng) const override;
    const NoiseParams& params() const { return params_; }

  private:
    NoiseParams params_;
};

} // namespace spinbath::noise
