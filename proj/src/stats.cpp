#include "spinbath/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spinbath::stats {

double Summary::se() const { return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }

Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(s.n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    s.mean = mean;
    s.variance = s.n > 1 ? ss / static_cast<double>(s.n - 1) : 0.0;
    return s;
}

double kolmogorov_q(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // complement of the theta-function form of the CDF, accurate for small x
        const double pi = std::numbers::pi;
        double cdf = 0.0;
        for (int j = 1; j < 40; j += 2) {
            const double term = std::exp(-j * j * pi * pi / (8.0 * x * x));
            cdf += term;
            if (term < 1e-18) break;
        }
        cdf *= std::sqrt(2.0 * pi) / x;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double q = 0.0;
    for (int j = 1; j < 200; ++j) {
        const double term = std::exp(-2.0 * j * j * x * x);
        q += (j % 2 == 1) ? 2.0 * term : -2.0 * term;
        if (term < 1e-18) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

KsResult ks_uniform(std::span<const double> samples) {
    if (samples.empty()) throw std::invalid_argument("stats: ks_uniform needs samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double u = std::clamp(sorted[i], 0.0, 1.0);
        const double di = static_cast<double>(i);
        d = std::max({d, (di + 1.0) / n - u, u - di / n});
    }
    return {d, kolmogorov_q(std::sqrt(n) * d)};
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("stats: ks_two_sample needs samples");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] <= sb[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double neff = na * nb / (na + nb);
    return {d, kolmogorov_q(std::sqrt(neff) * d)};
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("stats: linear_fit needs matching inputs, n >= 2");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vxx = sxx - sx * sx / n;
    const double vxy = sxy - sx * sy / n;
    const double vyy = syy - sy * sy / n;
    LinearFit fit;
    if (vxx <= 0.0) return fit;
    fit.slope = vxy / vxx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r_squared = vyy > 0.0 ? vxy * vxy / (vxx * vyy) : 1.0;
    return fit;
}

FitResult relaxation_fit(std::span<const double> times, std::span<const double> means) {
    if (times.size() != means.size())
        throw std::invalid_argument("stats: relaxation_fit needs matching inputs");
    std::vector<double> ts, logs;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double resid = 0.5 - means[i];
        if (means[i] < 0.45 && resid > 1e-12) {
            ts.push_back(times[i]);
            logs.push_back(std::log(resid));
        }
    }
    FitResult out;
    if (ts.size() < 3) return out;
    const auto [lo, hi] = std::minmax_element(logs.begin(), logs.end());
    // no measurable decay => degenerate fit (e.g. kappa = 0, mean pinned at 0)
    if (*hi - *lo < 1e-9) return out;
    const auto fit = linear_fit(ts, logs);
    if (!(fit.slope < 0.0)) return out;
    out.rate = -fit.slope;
    out.amplitude = std::exp(fit.intercept);
    out.r_squared = fit.r_squared;
    out.success = true;
    return out;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
    if (series.size() <= 4 * max_lag)
        throw std::invalid_argument("stats: series too short for requested max_lag");
    const double n = static_cast<double>(series.size());
    std::vector<double> r(max_lag + 1, 1.0);
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    if (*lo == *hi) return r;  // constant series: correlation 1 by convention
    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;
    double c0 = 0.0;
    for (double x : series) c0 += (x - mean) * (x - mean);
    c0 /= n;
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < series.size(); ++i)
            c += (series[i] - mean) * (series[i + lag] - mean);
        r[lag] = c / n / c0;
    }
    return r;
}

} // namespace spinbath::stats
