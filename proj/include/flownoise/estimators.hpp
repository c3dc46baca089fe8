#pragma once

// Statistical tests of the distributional claims: the black-noise variance
// scan with its classical negative control, coalescing-walk meeting
// probabilities against a dynamic-programming oracle, the supermartingale
// distance check, the stickiness convolution law, the Poisson snake spot
// statistics, and the circle-flow limit tests.
//
// Conventions used throughout: acceptance bands are 3 standard errors;
// Kolmogorov-Smirnov comparisons use the asymptotic critical value at the
// 1% level and require sample sizes >= 10^4; every test is deterministic
// given (seed, parameters).

#include <cstdint>
#include <string>
#include <vector>

#include "flownoise/stats.hpp"

namespace flownoise::estimators {

// ---------------------------------------------------------------------------
// Black-noise variance scan

enum class ScanModel {
    arratia,            // shared per-site arrows (coalescing walks)
    classical_control,  // independent per-site walks, same functional
    sticky_7j,          // per-site Beta(eps,eps) coins, kernel-averaged
};

enum class PhiKind {
    distance_to_point,  // circular distance to 0 (Lipschitz 1)
    sine,               // sin(2 pi x) / (2 pi)  (Lipschitz 1)
    constant,           // 1 everywhere (degenerate control)
    tabulated,          // per-site values supplied by the caller
};

struct VarianceScanResult {
    std::vector<double> scales;      // continuum epsilon values
    std::vector<double> variances;   // Var of the integral functional
    std::vector<double> ratios;      // variance / epsilon
    std::vector<double> std_errors;  // SE of each variance estimate
    double trend_p_value = 1.0;      // exact p for a decreasing ratio trend
    bool strictly_decreasing = false;
};

// Monte Carlo variance of int phi(Xi^{0,eps}_x) nu(dx) on the circle Z_m
// embedded in T = R/Z (space x/m, time 1/m^2). nu is given by its density
// against the uniform measure, one value in [0,1] per site (empty means
// uniform); densities above 1 are rejected, which is how point masses and
// other non-dominated measures fail the precondition. Every eps must be a
// whole number of lattice steps, i.e. eps * m^2 integral and >= 1.
// A tabulated phi supplies one value per site and must be 1-Lipschitz on
// the circle (adjacent sites differ by at most 1/m).
VarianceScanResult blacknoise_variance_scan(ScanModel model, std::int64_t m,
                                            PhiKind phi,
                                            const std::vector<double>& nu_density,
                                            std::vector<double> eps_grid,
                                            std::int64_t replicas, std::uint64_t seed,
                                            double beta_eps = 0.25, int threads = 1,
                                            const std::vector<double>& phi_table = {});

std::string variance_scan_csv(const VarianceScanResult& r);

// ---------------------------------------------------------------------------
// Arratia meeting probability

struct MeetingEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
};

// Fraction of replicas in which walkers from x1 and x2 on the circle Z_m
// have met by step t (walkers share the arrow whenever they share a site).
MeetingEstimate meeting_probability(std::int64_t m, std::int64_t x1, std::int64_t x2,
                                    std::int64_t t_steps, std::int64_t replicas,
                                    std::uint64_t seed);

// Exact absorption probability of the difference walk on Z (steps -2/0/+2
// with probabilities 1/4, 1/2, 1/4, absorbed at 0) within t steps. Valid for
// the circle as long as the walk cannot wrap (m > distance + 2t).
double meeting_probability_oracle(std::int64_t distance, std::int64_t t_steps);

// Exact E[distance] of the same difference walk on Z after t steps
// (martingale: constant in t).
double line_mean_distance_oracle(std::int64_t distance, std::int64_t t_steps);

// ---------------------------------------------------------------------------
// Distance supermartingale

struct SupermartingaleReport {
    std::vector<double> mean_distance;  // index = time step, entry 0 = start
    std::vector<double> std_errors;
    double initial_distance = 0.0;
    bool within_band = false;  // mean <= initial + 3 SE at every step
};

SupermartingaleReport distance_supermartingale_check(std::int64_t m, std::int64_t x1,
                                                     std::int64_t x2,
                                                     std::int64_t horizon,
                                                     std::int64_t replicas,
                                                     std::uint64_t seed);

// ---------------------------------------------------------------------------
// Stickiness convolution law

struct ConvolutionReport {
    double atom_composed = 0.0;  // Pr{c = 0} via compose(inc(s), inc(t))
    double atom_direct = 0.0;    // Pr{c = 0} via inc(s + t)
    double atom_z = 0.0;         // |difference| in standard errors
    stats::KsStat ks;            // two-sample KS on the positive parts
    double ks_critical_1pct = 0.0;
    bool pass = false;
};

ConvolutionReport sticky_convolution_check(double s, double t, double lambda,
                                           std::int64_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Poisson snake

struct SnakeReport {
    double lambda = 0.0;
    double dt = 0.0;
    double window = 0.0;                  // spot-count window (0, window]
    double mean_count_per_unit = 0.0;     // should be ~ 1/lambda
    double count_se_per_unit = 0.0;
    stats::KsStat spacing_ks;             // spacings vs Exp(1/lambda)
    double ks_critical_1pct = 0.0;
    std::int64_t replicas = 0;
};

// Simulates the discrete stickiness walk, maintains the spot set
// C_t = {c_{s,t} : s < t} \ {0} incrementally, and reports the stationary
// spot statistics at the final time of each replica. Spot positions are in
// continuum units (lattice value times sqrt(dt)).
SnakeReport snake_spot_statistics(double lambda, double dt, std::int64_t steps,
                                  std::int64_t burn_in, std::int64_t replicas,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Circle flow limit

struct CircleFlowReport {
    double chi2_statistic = 0.0;
    double chi2_p_value = 0.0;
    std::int64_t bins = 0;
    // complex sample correlation between exp(2 pi i Y_{0,1}) and
    // exp(2 pi i Y_{s,t}) for (s,t) = (0.2, 0.8)
    double corr_re = 0.0;
    double corr_im = 0.0;
    double corr_se = 0.0;
    bool uniform_ok = false;       // chi2 p > 0.01
    bool independence_ok = false;  // |corr| within 3 SE componentwise
};

CircleFlowReport circle_flow_tests(double eps, std::int64_t replicas,
                                   std::uint64_t seed, std::int64_t bins = 16);

// JSON lines {test, params, statistic, threshold, verdict} for the reports.
std::string report_json(const VarianceScanResult& r);
std::string report_json(const ConvolutionReport& r);
std::string report_json(const SnakeReport& r);
std::string report_json(const CircleFlowReport& r);
std::string report_json(const MeetingEstimate& r, double oracle);
std::string report_json(const SupermartingaleReport& r);

}  // namespace flownoise::estimators
