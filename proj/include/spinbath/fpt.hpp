#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spinbath/dynamics.hpp"

namespace spinbath::fpt {

// First-passage-time ensemble summary for the level variable y = 2 rho - 1.
struct FptResult {
    std::vector<double> taus;      // per path; censored entries hold the horizon
    std::vector<char> censored;    // 1 if the path never crossed before t_final
    double mean = 0.0;             // over uncensored samples
    double se = 0.0;
    bool mean_is_lower_bound = false;  // censoring fraction > 10%
    double censor_fraction = 0.0;
    double tail_rate = 0.0;        // exponential fit of P(tau > t), upper half
    double tail_r_squared = 0.0;
};

struct DomainSpec {
    double y_low = -1.0;
    double y_high = 1.0;
    double z_bound = 1.0;  // the |Z_t| <= bound device used in the exit analysis

    void validate() const;
};

// First time the stored y_t = 2 rho_t - 1 exceeds y_level, linearly
// interpolated between grid points; nullopt when censored at the horizon.
std::optional<double> first_passage(const dynamics::Trajectory& traj, double y_level);

// First exit time from (y_low, y_high), with the exit side (true = high).
std::optional<std::pair<double, bool>> first_exit(const dynamics::Trajectory& traj, double y_low,
                                                  double y_high);

// Monte Carlo over n_paths independent noise realisations from U_0 = identity.
// Requires n_paths >= 100 and t_final >= 20 T*. Censored samples enter the
// tail fit but not the mean.
FptResult fpt_ensemble(const dynamics::SimParams& params, double y_level, int n_paths);

// Worst-of-grid survival probe for the exit time from
// D = {|Z| < z_bound} x (y_low, y_high): q(T) estimates sup_x P^x(tau_D > T)
// over a 5x5 grid of initial (Z_0, y_0); n_paths runs per grid point,
// horizon 3T so the Markov-chaining factors q(2T), q(3T) come for free.
struct ProbeResult {
    double q = 0.0;                    // worst-grid survival at T
    double q_2T = 0.0, q_3T = 0.0;     // worst-grid survival at 2T, 3T
    double implied_mean_bound = 0.0;   // T/(q log(1/q)), when available
    bool bound_available = false;      // q in (0,1) required
    double restricted_mean = 0.0;      // mean of tau_D censored at 3T, all runs
};
ProbeResult survival_probe(const dynamics::SimParams& params, const DomainSpec& domain,
                           double T_probe, int n_paths);

// Renewal composition (E1 + E2)/p_success for a two-stage passage with
// success probability p_success in (0, 1].
double renewal_compose(double E1, double E2, double p_success);

// Patched-domain bound 2 (E1 + E2)/(1 - p1 p2), requires p1 p2 < 1.
double renewal_bound(double E1, double E2, double p1, double p2);

// Mean first time |Z_t| reaches `level` from a stationary start (exact OU
// stepping at resolution dt); Kramers-type growth exp(gamma level^2/sigma^2).
struct ExcursionResult {
    double mean = 0.0;
    double se = 0.0;
    int censored = 0;
    int n = 0;
};
ExcursionResult z_excursion_time(const noise::NoiseParams& params, double level, int n_paths,
                                 double dt, double horizon, std::uint64_t seed);

// Mean first time Z_t hits 0 starting from z0 (O(1/gamma)).
ExcursionResult z_zero_hitting_time(const noise::NoiseParams& params, double z0, int n_paths,
                                    double dt, double horizon, std::uint64_t seed);

} // namespace spinbath::fpt
