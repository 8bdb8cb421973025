#include "spinbath/fpt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinbath/averaging.hpp"
#include "spinbath/parallel.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/stats.hpp"

namespace spinbath::fpt {

void DomainSpec::validate() const {
    if (!(-1.0 <= y_low && y_low < y_high && y_high <= 1.0))
        throw std::invalid_argument("fpt: need -1 <= y_low < y_high <= 1");
    if (!(z_bound > 0.0)) throw std::invalid_argument("fpt: z_bound must be > 0");
}

namespace {

double interp_crossing(double t0, double y0, double t1, double y1, double level) {
    const double f = (level - y0) / (y1 - y0);
    return t0 + f * (t1 - t0);
}

} // namespace

std::optional<double> first_passage(const dynamics::Trajectory& traj, double y_level) {
    if (traj.size() == 0) throw std::invalid_argument("fpt: empty trajectory");
    double y_prev = 2.0 * traj.rho[0] - 1.0;
    // starting at or above the level counts as immediate passage (tau = 0)
    if (y_prev >= y_level) return 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double y = 2.0 * traj.rho[i] - 1.0;
        if (y > y_level)
            return interp_crossing(traj.times[i - 1], y_prev, traj.times[i], y, y_level);
        y_prev = y;
    }
    return std::nullopt;
}

std::optional<std::pair<double, bool>> first_exit(const dynamics::Trajectory& traj, double y_low,
                                                  double y_high) {
    if (traj.size() == 0) throw std::invalid_argument("fpt: empty trajectory");
    double y_prev = 2.0 * traj.rho[0] - 1.0;
    if (y_prev >= y_high) return std::pair{0.0, true};
    if (y_prev <= y_low) return std::pair{0.0, false};
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double y = 2.0 * traj.rho[i] - 1.0;
        if (y >= y_high)
            return std::pair{interp_crossing(traj.times[i - 1], y_prev, traj.times[i], y, y_high),
                             true};
        if (y <= y_low)
            return std::pair{interp_crossing(traj.times[i - 1], y_prev, traj.times[i], y, y_low),
                             false};
        y_prev = y;
    }
    return std::nullopt;
}

namespace {

// Exponential tail fit of the empirical survival on the upper half of the
// sample; censored observations keep contributing to the survival curve.
void fit_tail(FptResult& r, double horizon) {
    std::vector<double> uncensored;
    for (std::size_t i = 0; i < r.taus.size(); ++i)
        if (!r.censored[i]) uncensored.push_back(r.taus[i]);
    if (uncensored.size() < 10) return;
    std::sort(uncensored.begin(), uncensored.end());
    const double t_lo = uncensored[uncensored.size() / 2];
    const double n = static_cast<double>(r.taus.size());

    std::vector<double> sorted_all(r.taus);
    std::sort(sorted_all.begin(), sorted_all.end());
    std::vector<double> ts, logs;
    for (double t : uncensored) {
        if (t < t_lo || t >= horizon) continue;
        const auto above =
            sorted_all.end() - std::upper_bound(sorted_all.begin(), sorted_all.end(), t);
        const double surv = static_cast<double>(above) / n;
        if (surv <= 0.0) break;
        ts.push_back(t);
        logs.push_back(std::log(surv));
    }
    if (ts.size() < 5) return;
    const auto fit = stats::linear_fit(ts, logs);
    r.tail_rate = -fit.slope;
    r.tail_r_squared = fit.r_squared;
}

} // namespace

FptResult fpt_ensemble(const dynamics::SimParams& params, double y_level, int n_paths) {
    params.validate();
    if (n_paths < 100) throw std::invalid_argument("fpt: n_paths must be >= 100");
    const averaging::EffectiveParams eff(params.noise.gamma, params.kappa, params.noise.sigma);
    if (params.t_final < 20.0 * eff.tstar)
        throw std::invalid_argument("fpt: t_final must be >= 20 T*");

    FptResult out;
    out.taus.assign(n_paths, 0.0);
    out.censored.assign(n_paths, 0);
    parallel::parallel_for(n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(params.seed, i);
        const auto traj = dynamics::simulate(params, su2::QuaternionState{}, rng);
        const auto tau = first_passage(traj, y_level);
        out.taus[i] = tau.value_or(params.t_final);
        out.censored[i] = tau ? 0 : 1;
    });

    std::vector<double> uncensored;
    for (int i = 0; i < n_paths; ++i)
        if (!out.censored[i]) uncensored.push_back(out.taus[i]);
    out.censor_fraction = 1.0 - static_cast<double>(uncensored.size()) / n_paths;
    out.mean_is_lower_bound = out.censor_fraction > 0.10;
    const auto s = stats::summarize(uncensored);
    out.mean = s.mean;
    out.se = s.se();
    fit_tail(out, params.t_final);
    return out;
}

namespace {

// Streaming first-exit from D = {|Z| < z_bound} x (y_low, y_high); detection
// at full step resolution, y-crossings linearly interpolated.
std::optional<double> first_exit_streaming(const dynamics::SimParams& params,
                                           const su2::QuaternionState& q0, double z0,
                                           const DomainSpec& domain, double horizon,
                                           std::mt19937_64& rng) {
    const noise::OuStepper half(params.noise, params.dt / 2.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    su2::QuaternionState q = q0.normalized();
    double z = z0;
    double y_prev = 2.0 * dynamics::transition_probability(q) - 1.0;
    if (y_prev >= domain.y_high || y_prev <= domain.y_low || std::abs(z) > domain.z_bound)
        return 0.0;
    const auto n_steps = static_cast<std::size_t>(std::llround(horizon / params.dt));
    for (std::size_t i = 0; i < n_steps; ++i) {
        const double zm = half.step(z, normal(rng));
        const double z1 = half.step(zm, normal(rng));
        q = dynamics::step(q, {z, zm, z1}, params.kappa, params.dt);
        z = z1;
        const double t0 = i * params.dt, t1 = (i + 1) * params.dt;
        const double y = q.x1 * q.x1 + q.x2 * q.x2;
        const double yv = 2.0 * y - 1.0;
        if (yv >= domain.y_high) return interp_crossing(t0, y_prev, t1, yv, domain.y_high);
        if (yv <= domain.y_low) return interp_crossing(t0, y_prev, t1, yv, domain.y_low);
        if (std::abs(z) > domain.z_bound) return t1;
        y_prev = yv;
    }
    return std::nullopt;
}

} // namespace

ProbeResult survival_probe(const dynamics::SimParams& params, const DomainSpec& domain,
                           double T_probe, int n_paths) {
    params.validate();
    domain.validate();
    if (n_paths < 100) throw std::invalid_argument("fpt: n_paths must be >= 100");
    if (!(T_probe > 0.0)) throw std::invalid_argument("fpt: T_probe must be > 0");

    constexpr int grid = 5;
    const double horizon = 3.0 * T_probe;
    const double dy = domain.y_high - domain.y_low;

    ProbeResult out;
    double total_tau = 0.0;
    std::size_t total_runs = 0;
    for (int gi = 0; gi < grid; ++gi) {
        const double z0 = -0.8 * domain.z_bound + 1.6 * domain.z_bound * gi / (grid - 1);
        for (int gj = 0; gj < grid; ++gj) {
            const double y0 = domain.y_low + dy * (0.1 + 0.8 * gj / (grid - 1));
            const double chi = std::asin(std::sqrt((y0 + 1.0) / 2.0));
            const auto q0 = su2::angles_to_quaternion({chi, 0.0, 0.0});
            std::vector<double> taus(n_paths);
            parallel::parallel_for(n_paths, [&](std::size_t i) {
                auto rng = rng::derive_stream(params.seed,
                                              static_cast<std::uint64_t>(gi * grid + gj) * n_paths + i);
                const auto tau = first_exit_streaming(params, q0, z0, domain, horizon, rng);
                taus[i] = tau.value_or(horizon);
            });
            int s1 = 0, s2 = 0, s3 = 0;
            for (double t : taus) {
                total_tau += t;
                ++total_runs;
                if (t > T_probe) ++s1;
                if (t > 2.0 * T_probe) ++s2;
                if (t >= horizon) ++s3;
            }
            out.q = std::max(out.q, static_cast<double>(s1) / n_paths);
            out.q_2T = std::max(out.q_2T, static_cast<double>(s2) / n_paths);
            out.q_3T = std::max(out.q_3T, static_cast<double>(s3) / n_paths);
        }
    }
    out.restricted_mean = total_tau / static_cast<double>(total_runs);
    if (out.q > 0.0 && out.q < 1.0) {
        out.implied_mean_bound = T_probe / (out.q * std::log(1.0 / out.q));
        out.bound_available = true;
    }
    return out;
}

double renewal_compose(double E1, double E2, double p_success) {
    if (!(p_success > 0.0 && p_success <= 1.0))
        throw std::invalid_argument("fpt: p_success must be in (0, 1]");
    return (E1 + E2) / p_success;
}

double renewal_bound(double E1, double E2, double p1, double p2) {
    if (!(p1 >= 0.0 && p2 >= 0.0 && p1 * p2 < 1.0))
        throw std::invalid_argument("fpt: need p1, p2 >= 0 with p1*p2 < 1");
    return 2.0 * (E1 + E2) / (1.0 - p1 * p2);
}

namespace {

ExcursionResult z_hitting_time(const noise::NoiseParams& params, double z_start,
                               bool from_stationary, double level, bool hit_zero, int n_paths,
                               double dt, double horizon, std::uint64_t seed) {
    params.validate();
    if (n_paths < 1) throw std::invalid_argument("fpt: n_paths must be >= 1");
    const noise::OuStepper stepper(params, dt);
    std::vector<double> hits(n_paths, -1.0);
    parallel::parallel_for(n_paths, [&](std::size_t i) {
        auto rng = rng::derive_stream(seed, i);
        std::normal_distribution<double> normal(0.0, 1.0);
        double z = from_stationary ? noise::sample_stationary(params, rng) : z_start;
        if (!hit_zero && std::abs(z) >= level) {
            hits[i] = 0.0;
            return;
        }
        const auto n_steps = static_cast<std::size_t>(std::llround(horizon / dt));
        for (std::size_t s = 0; s < n_steps; ++s) {
            const double z1 = stepper.step(z, normal(rng));
            if (hit_zero ? (z * z1 <= 0.0) : (std::abs(z1) >= level)) {
                // linear interpolation inside the step
                const double a = hit_zero ? z : std::abs(z) - level;
                const double b = hit_zero ? z1 : std::abs(z1) - level;
                const double f = b == a ? 1.0 : std::clamp(-a / (b - a), 0.0, 1.0);
                hits[i] = (s + f) * dt;
                return;
            }
            z = z1;
        }
    });
    ExcursionResult out;
    out.n = n_paths;
    std::vector<double> ok;
    for (double h : hits)
        if (h >= 0.0)
            ok.push_back(h);
        else
            ++out.censored;
    const auto s = stats::summarize(ok);
    out.mean = s.mean;
    out.se = s.se();
    return out;
}

} // namespace

ExcursionResult z_excursion_time(const noise::NoiseParams& params, double level, int n_paths,
                                 double dt, double horizon, std::uint64_t seed) {
    if (level < 0.0) throw std::invalid_argument("fpt: level must be >= 0");
    if (level == 0.0) return {0.0, 0.0, 0, n_paths};
    return z_hitting_time(params, 0.0, true, level, false, n_paths, dt, horizon, seed);
}

ExcursionResult z_zero_hitting_time(const noise::NoiseParams& params, double z0, int n_paths,
                                    double dt, double horizon, std::uint64_t seed) {
    return z_hitting_time(params, z0, false, 0.0, true, n_paths, dt, horizon, seed);
}

} // namespace spinbath::fpt
