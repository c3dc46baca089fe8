#pragma once

// Small statistical toolbox shared by the estimators and tests: moment
// accumulation, jackknife errors, chi^2 and Kolmogorov tail functions,
// two-sample / one-sample KS statistics, and an exact small-n trend test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace flownoise::stats {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t n = 0;
};

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

// Leave-one-out jackknife of the sample mean. For the plain mean this
// coincides with sd/sqrt(n); kept in jackknife form because downstream
// statistics are sometimes ratios of accumulated sums.
inline MeanSe mean_with_jackknife_se(std::span<const double> xs) {
    const auto n = static_cast<std::int64_t>(xs.size());
    if (n < 2) throw std::invalid_argument("jackknife: need >= 2 replicas");
    const double total = std::accumulate(xs.begin(), xs.end(), 0.0);
    const double m = total / static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) {
        const double loo = (total - x) / static_cast<double>(n - 1);
        ss += (loo - m) * (loo - m);
    }
    const double var = ss * static_cast<double>(n - 1) / static_cast<double>(n);
    return {m, std::sqrt(var), n};
}

// Regularized incomplete gamma P(a,x) via series / continued fraction.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction (modified Lentz)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// Survival function of chi^2 with `df` degrees of freedom.
inline double chi2_sf(double x, double df) { return gamma_q(0.5 * df, 0.5 * x); }

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 1.0;
    std::int64_t df = 0;
};

// Pearson chi^2 against given cell probabilities.
inline Chi2Result chi2_gof(std::span<const std::int64_t> observed,
                           std::span<const double> probs) {
    if (observed.size() != probs.size() || observed.size() < 2)
        throw std::invalid_argument("chi2_gof: bad cell layout");
    const double total = static_cast<double>(
        std::accumulate(observed.begin(), observed.end(), std::int64_t{0}));
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = total * probs[i];
        if (e <= 0.0) throw std::invalid_argument("chi2_gof: zero expected count");
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    const auto df = static_cast<std::int64_t>(observed.size()) - 1;
    return {stat, chi2_sf(stat, static_cast<double>(df)), df};
}

// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Critical KS statistic at level alpha for effective sample size n_eff
// (n_eff = n for one-sample, n*m/(n+m) for two-sample). Asymptotic form;
// callers enforce sample sizes large enough for it to apply.
inline double ks_critical(double alpha, double n_eff) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(n_eff > 0.0))
        throw std::invalid_argument("ks_critical: bad arguments");
    return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(n_eff);
}

struct KsStat {
    double statistic = 0.0;
    double p_value_bound = 1.0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;  // 0 for one-sample
};

inline KsStat ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na -
                                  static_cast<double>(j) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    return {d, kolmogorov_q(std::sqrt(n_eff) * d),
            static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(b.size())};
}

inline KsStat ks_one_sample(std::vector<double> a,
                            const std::function<double(double)>& cdf) {
    if (a.size() < 2) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    }
    return {d, kolmogorov_q(std::sqrt(n) * d),
            static_cast<std::int64_t>(a.size()), 0};
}

// Exact one-sided p-value for a decreasing trend in a short sequence,
// using the number of concordant/discordant pairs (Kendall-type statistic)
// under the exchangeable null. Sequence lengths up to 8 are enumerated.
inline double trend_decreasing_p_value(std::span<const double> xs) {
    const auto n = xs.size();
    if (n < 3 || n > 8) throw std::invalid_argument("trend test: need 3..8 points");
    auto score = [&](std::span<const std::size_t> order) {
        int s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double a = xs[order[i]], b = xs[order[j]];
                if (a > b) ++s;       // decreasing pair
                else if (a < b) --s;  // increasing pair
            }
        return s;
    };
    std::vector<std::size_t> id(n);
    std::iota(id.begin(), id.end(), std::size_t{0});
    const int observed = score(id);
    std::vector<std::size_t> perm = id;
    std::int64_t at_least = 0, total = 0;
    std::sort(perm.begin(), perm.end());
    do {
        ++total;
        if (score(perm) >= observed) ++at_least;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace flownoise::stats
