#include "flownoise/sticky_exact.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace flownoise::sticky {

namespace {

constexpr std::int64_t kMaxStates = 100000;

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("eps must be in (0,1)");
}

}  // namespace

double log_alpha(std::int64_t k, double eps) {
    check_eps(eps);
    if (k < 0) throw std::invalid_argument("log_alpha: k must be >= 0");
    return std::lgamma(static_cast<double>(k) + eps) -
           std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(eps);
}

double log_beta_fn(std::int64_t n, double eps) {
    check_eps(eps);
    if (n < 0) throw std::invalid_argument("log_beta_fn: n must be >= 0");
    return std::lgamma(static_cast<double>(n) + 2.0 * eps) -
           std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(2.0 * eps);
}

double alpha(std::int64_t k, double eps) { return std::exp(log_alpha(k, eps)); }
double beta_fn(std::int64_t n, double eps) { return std::exp(log_beta_fn(n, eps)); }

BetaMomentCheck beta_moment_identity(std::int64_t n, std::int64_t k, double eps) {
    check_eps(eps);
    if (k < 0 || k > n) throw std::invalid_argument("beta_moment_identity: need 0 <= k <= n");
    // lhs: binom(n,k) * B(k+eps, n-k+eps) / B(eps,eps) via log-gamma.
    const double log_binom = std::lgamma(static_cast<double>(n) + 1.0) -
                             std::lgamma(static_cast<double>(k) + 1.0) -
                             std::lgamma(static_cast<double>(n - k) + 1.0);
    const double log_moment = std::lgamma(2.0 * eps) - 2.0 * std::lgamma(eps) +
                              std::lgamma(static_cast<double>(k) + eps) +
                              std::lgamma(static_cast<double>(n - k) + eps) -
                              std::lgamma(static_cast<double>(n) + 2.0 * eps);
    const double lhs = std::exp(log_binom + log_moment);
    const double rhs =
        std::exp(log_alpha(k, eps) + log_alpha(n - k, eps) - log_beta_fn(n, eps));
    const double rel = std::fabs(lhs - rhs) / std::max(std::fabs(rhs), 1e-300);
    return {lhs, rhs, rel};
}

OccupationConfig channel_source(const ChannelFlow& ch) {
    if (ch.to_right.size() != ch.to_left.size() || ch.to_right.empty())
        throw std::invalid_argument("channel: inconsistent edge vectors");
    OccupationConfig s(ch.to_right.size());
    for (std::size_t x = 0; x < s.size(); ++x) {
        if (ch.to_right[x] < 0 || ch.to_left[x] < 0)
            throw std::invalid_argument("channel: negative edge occupation");
        s[x] = ch.to_right[x] + ch.to_left[x];
    }
    return s;
}

OccupationConfig channel_target(const ChannelFlow& ch) {
    const auto m = static_cast<std::int64_t>(ch.to_right.size());
    OccupationConfig s(static_cast<std::size_t>(m), 0);
    for (std::int64_t x = 0; x < m; ++x) {
        s[static_cast<std::size_t>((x + 1) % m)] += ch.to_right[static_cast<std::size_t>(x)];
        s[static_cast<std::size_t>((x - 1 + m) % m)] += ch.to_left[static_cast<std::size_t>(x)];
    }
    return s;
}

std::int64_t state_count(std::int64_t m, std::int64_t n) {
    // C(n+m-1, m-1), overflow-safe for the sizes this module accepts.
    double c = 1.0;
    for (std::int64_t i = 1; i < m; ++i)
        c *= static_cast<double>(n + i) / static_cast<double>(i);
    return static_cast<std::int64_t>(std::llround(c));
}

std::vector<OccupationConfig> enumerate_configs(std::int64_t m, std::int64_t n) {
    if (m < 3) throw std::invalid_argument("enumerate_configs: m must be >= 3");
    if (n < 1) throw std::invalid_argument("enumerate_configs: n must be >= 1");
    if (state_count(m, n) > kMaxStates)
        throw std::invalid_argument("enumerate_configs: state space exceeds 10^5");
    std::vector<OccupationConfig> out;
    OccupationConfig s(static_cast<std::size_t>(m), 0);
    // Recursive composition enumeration.
    std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t site,
                                                              std::int64_t left) {
        if (site == m - 1) {
            s[static_cast<std::size_t>(site)] = left;
            out.push_back(s);
            return;
        }
        for (std::int64_t k = left; k >= 0; --k) {
            s[static_cast<std::size_t>(site)] = k;
            rec(site + 1, left - k);
        }
    };
    rec(0, n);
    return out;
}

std::map<OccupationConfig, double> invariant_measure(std::int64_t m, std::int64_t n,
                                                     double eps) {
    check_eps(eps);
    const auto configs = enumerate_configs(m, n);
    // Work in log space relative to the largest weight.
    std::vector<double> logw(configs.size());
    double max_logw = -1e300;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        double lw = 0.0;
        for (std::int64_t sx : configs[i]) lw += log_beta_fn(sx, eps);
        logw[i] = lw;
        max_logw = std::max(max_logw, lw);
    }
    double z = 0.0;
    for (double lw : logw) z += std::exp(lw - max_logw);
    std::map<OccupationConfig, double> mu;
    for (std::size_t i = 0; i < configs.size(); ++i)
        mu[configs[i]] = std::exp(logw[i] - max_logw) / z;
    return mu;
}

double channel_probability(const OccupationConfig& source, const ChannelFlow& channel,
                           double eps) {
    check_eps(eps);
    const OccupationConfig implied = channel_source(channel);
    if (implied != source)
        throw std::invalid_argument("channel_probability: channel inconsistent with source");
    double logp = 0.0;
    for (std::size_t x = 0; x < source.size(); ++x) {
        logp += log_alpha(channel.to_right[x], eps) + log_alpha(channel.to_left[x], eps) -
                log_beta_fn(source[x], eps);
    }
    return std::exp(logp);
}

namespace {

// Visit every channel from `source` (each site splits its occupants into
// right/left movers in all possible ways).
void for_each_channel(const OccupationConfig& source,
                      const std::function<void(const ChannelFlow&)>& visit) {
    const auto m = source.size();
    ChannelFlow ch;
    ch.to_right.assign(m, 0);
    ch.to_left.assign(m, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t x) {
        if (x == m) {
            visit(ch);
            return;
        }
        for (std::int64_t k = 0; k <= source[x]; ++k) {
            ch.to_right[x] = k;
            ch.to_left[x] = source[x] - k;
            rec(x + 1);
        }
    };
    rec(0);
}

std::string config_to_string(const OccupationConfig& s) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ',';
        os << s[i];
    }
    os << ')';
    return os.str();
}

}  // namespace

DetailedBalanceReport check_detailed_balance(std::int64_t m, std::int64_t n,
                                             double eps) {
    check_eps(eps);
    const auto mu = invariant_measure(m, n, eps);
    const auto configs = enumerate_configs(m, n);
    std::map<OccupationConfig, std::size_t> index;
    for (std::size_t i = 0; i < configs.size(); ++i) index[configs[i]] = i;

    DetailedBalanceReport report;
    report.m = m;
    report.n = n;
    report.eps = eps;

    // mu P accumulated from channels; also per-channel reversal symmetry.
    std::vector<double> mu_p(configs.size(), 0.0);
    for (const auto& source : configs) {
        const double mu_s = mu.at(source);
        double channel_sum = 0.0;
        for_each_channel(source, [&](const ChannelFlow& ch) {
            const double p = channel_probability(source, ch, eps);
            channel_sum += p;
            const OccupationConfig target = channel_target(ch);
            mu_p[index.at(target)] += mu_s * p;

            // Time reversal: every edge flow runs backwards.
            ChannelFlow rev;
            rev.to_right.assign(static_cast<std::size_t>(m), 0);
            rev.to_left.assign(static_cast<std::size_t>(m), 0);
            for (std::int64_t x = 0; x < m; ++x) {
                rev.to_right[static_cast<std::size_t>(x)] =
                    ch.to_left[static_cast<std::size_t>((x + 1) % m)];
                rev.to_left[static_cast<std::size_t>(x)] =
                    ch.to_right[static_cast<std::size_t>((x - 1 + m) % m)];
            }
            const double p_rev = channel_probability(target, rev, eps);
            const double forward = mu_s * p;
            const double backward = mu.at(target) * p_rev;
            const double viol =
                std::fabs(forward - backward) / std::max(forward, 1e-300);
            if (viol > report.max_channel_violation) {
                report.max_channel_violation = viol;
                report.worst_channel =
                    config_to_string(source) + "->" + config_to_string(target);
            }
        });
        report.max_channel_sum_violation =
            std::max(report.max_channel_sum_violation, std::fabs(channel_sum - 1.0));
    }
    for (std::size_t i = 0; i < configs.size(); ++i)
        report.stationarity_violation = std::max(
            report.stationarity_violation, std::fabs(mu_p[i] - mu.at(configs[i])));
    return report;
}

std::string detailed_balance_json(const DetailedBalanceReport& report) {
    nlohmann::json j;
    j["m"] = report.m;
    j["n"] = report.n;
    j["eps"] = report.eps;
    j["max_violation"] = report.max_channel_violation;
    j["channel_sum_violation"] = report.max_channel_sum_violation;
    j["stationarity_violation"] = report.stationarity_violation;
    j["worst_channel"] = report.worst_channel;
    return j.dump(2);
}

std::vector<OccupationConfig> simulate_sticky_lattice(std::int64_t m,
                                                      std::int64_t n_particles,
                                                      double eps, std::int64_t steps,
                                                      Rng& rng) {
    check_eps(eps);
    if (m < 3) throw std::invalid_argument("simulate_sticky_lattice: m must be >= 3");
    if (n_particles < 1 || steps < 0)
        throw std::invalid_argument("simulate_sticky_lattice: bad particle/step count");
    OccupationConfig s(static_cast<std::size_t>(m), 0);
    s[0] = n_particles;
    std::vector<OccupationConfig> trajectory;
    trajectory.reserve(static_cast<std::size_t>(steps) + 1);
    trajectory.push_back(s);
    OccupationConfig next(static_cast<std::size_t>(m), 0);
    for (std::int64_t t = 0; t < steps; ++t) {
        std::fill(next.begin(), next.end(), 0);
        for (std::int64_t x = 0; x < m; ++x) {
            const std::int64_t count = s[static_cast<std::size_t>(x)];
            if (count == 0) {
                // Coins at empty sites influence nothing; skipping the draw
                // changes no observable law.
                continue;
            }
            const double theta = rng.beta(eps, eps);
            std::int64_t right = 0;
            for (std::int64_t i = 0; i < count; ++i)
                if (rng.bernoulli(theta)) ++right;
            next[static_cast<std::size_t>((x + 1) % m)] += right;
            next[static_cast<std::size_t>((x - 1 + m) % m)] += count - right;
        }
        s = next;
        trajectory.push_back(s);
    }
    return trajectory;
}

std::map<OccupationConfig, std::int64_t> occupancy_histogram(
    std::int64_t m, std::int64_t n_particles, double eps, std::int64_t steps,
    std::int64_t burn_in, Rng& rng) {
    check_eps(eps);
    if (m < 3) throw std::invalid_argument("occupancy_histogram: m must be >= 3");
    OccupationConfig s(static_cast<std::size_t>(m), 0);
    s[0] = n_particles;
    OccupationConfig next(static_cast<std::size_t>(m), 0);
    std::map<OccupationConfig, std::int64_t> hist;
    for (std::int64_t t = 0; t < burn_in + steps; ++t) {
        std::fill(next.begin(), next.end(), 0);
        for (std::int64_t x = 0; x < m; ++x) {
            const std::int64_t count = s[static_cast<std::size_t>(x)];
            if (count == 0) continue;
            const double theta = rng.beta(eps, eps);
            std::int64_t right = 0;
            for (std::int64_t i = 0; i < count; ++i)
                if (rng.bernoulli(theta)) ++right;
            next[static_cast<std::size_t>((x + 1) % m)] += right;
            next[static_cast<std::size_t>((x - 1 + m) % m)] += count - right;
        }
        s = next;
        if (t >= burn_in) ++hist[s];
    }
    return hist;
}

}  // namespace flownoise::sticky
