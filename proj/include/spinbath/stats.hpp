#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spinbath::stats {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance (n-1)

    double se() const;
};
Summary summarize(std::span<const double> xs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// Asymptotic Kolmogorov survival function Q(x) = P(sup |B| > x).
double kolmogorov_q(double x);

// Two-sided one-sample KS test against Uniform[0,1], asymptotic p-value.
// Rejects empty input.
KsResult ks_uniform(std::span<const double> samples);

// Two-sample KS test (asymptotic p-value with n_eff = n1 n2/(n1+n2)).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct FitResult {
    double rate = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    bool success = false;
};

// Least-squares fit of mean(t) = 1/2 - A exp(-rate t) on the window where
// mean < 0.45, linearized as log(1/2 - mean) = log A - rate t. Degenerate
// windows (flat data, no relaxation) are flagged instead of fitted.
FitResult relaxation_fit(std::span<const double> times, std::span<const double> means);

// Biased-normalized sample autocorrelation at lags 0..max_lag. A constant
// series has correlation 1 at every lag by convention. Requires
// series.size() > 4 * max_lag.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

} // namespace spinbath::stats
