#pragma once

// Exact verification of the sticky lattice flow algebra on the circle Z_m:
// Beta(eps,eps) moment products, the product-form invariant measure of the
// n-particle dynamics, transition channels built from edge occupation
// numbers, detailed balance per channel, and a direct simulator.
//
// alpha(k) = Gamma(k+eps) / (k! Gamma(eps)) and
// beta(n)  = Gamma(n+2 eps) / (n! Gamma(2 eps));
// everything is computed in log space (beta underflows quickly for small
// eps) and exponentiated only at the end.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "flownoise/rng.hpp"

namespace flownoise::sticky {

double log_alpha(std::int64_t k, double eps);
double log_beta_fn(std::int64_t n, double eps);
double alpha(std::int64_t k, double eps);
double beta_fn(std::int64_t n, double eps);

struct BetaMomentCheck {
    double lhs = 0.0;  // binom(n,k) E[theta^k (1-theta)^(n-k)], Beta-function route
    double rhs = 0.0;  // alpha(k) alpha(n-k) / beta(n)
    double rel_err = 0.0;
};

BetaMomentCheck beta_moment_identity(std::int64_t n, std::int64_t k, double eps);

// Occupation numbers s_x on Z_m, site-indexed; the particle count is the sum.
using OccupationConfig = std::vector<std::int64_t>;

// Edge occupation numbers of one transition: to_right[x] particles go from
// x to x+1 and to_left[x] from x to x-1 (indices mod m).
struct ChannelFlow {
    std::vector<std::int64_t> to_right;
    std::vector<std::int64_t> to_left;
};

OccupationConfig channel_source(const ChannelFlow& ch);
OccupationConfig channel_target(const ChannelFlow& ch);

// Number of occupation configs of n particles on m sites, C(n+m-1, m-1).
std::int64_t state_count(std::int64_t m, std::int64_t n);

// All occupation configs (error if the state space exceeds 10^5).
std::vector<OccupationConfig> enumerate_configs(std::int64_t m, std::int64_t n);

// Normalized product measure mu_n(s) ~ prod_x beta(s_x).
std::map<OccupationConfig, double> invariant_measure(std::int64_t m, std::int64_t n,
                                                     double eps);

// Probability of one transition channel from its source configuration:
// prod_x alpha(to_right[x]) alpha(to_left[x]) / beta(s_x). Channels from a
// fixed source sum to 1. Throws if the channel is inconsistent with source.
double channel_probability(const OccupationConfig& source, const ChannelFlow& channel,
                           double eps);

struct DetailedBalanceReport {
    std::int64_t m = 0;
    std::int64_t n = 0;
    double eps = 0.0;
    double max_channel_violation = 0.0;      // per-channel reversal symmetry
    double max_channel_sum_violation = 0.0;  // |sum of channels from a source - 1|
    double stationarity_violation = 0.0;     // max |(mu P - mu)(s)|
    std::string worst_channel;
};

// Enumerates every source configuration and every channel.
DetailedBalanceReport check_detailed_balance(std::int64_t m, std::int64_t n,
                                             double eps);

std::string detailed_balance_json(const DetailedBalanceReport& report);

// Direct simulation: per time step one Beta(eps,eps) coin per site, each
// particle at x moves to x+1 with the site's coin probability. Returns the
// configuration after every step (steps+1 entries including the start).
std::vector<OccupationConfig> simulate_sticky_lattice(std::int64_t m,
                                                      std::int64_t n_particles,
                                                      double eps, std::int64_t steps,
                                                      Rng& rng);

// Occupancy histogram over `steps` post-burn-in steps (memory-light variant
// for long runs). Keys are configurations, values are visit counts.
std::map<OccupationConfig, std::int64_t> occupancy_histogram(
    std::int64_t m, std::int64_t n_particles, double eps, std::int64_t steps,
    std::int64_t burn_in, Rng& rng);

}  // namespace flownoise::sticky
