#pragma once

// The rho-resampling coupling (alpha_rho, beta_rho) on discrete flows:
// every independent factor of a FlowPath (each step, and the zm-toy tail)
// is kept with probability rho and redrawn from the base law otherwise,
// independently across factors. Correlations E[(f o alpha)(conj f o beta)]
// are estimated by Monte Carlo over replicas with jackknife errors; the
// per-factor exact value |E f|^2 + rho Var f is available in closed form
// for finite step laws.
//
// Estimates for a specific functional are lower bounds on the maximal
// correlation of the coupling, never the supremum itself; there is no
// finite-sample algorithm for rho_max.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "flownoise/flow.hpp"

namespace flownoise {

struct CoupledPair {
    double rho = 1.0;
    FlowPath first;
    FlowPath second;
    std::vector<std::uint8_t> resampled;  // one flag per step
    std::uint8_t tail_resampled = 0;      // zm_toy only
};

struct CorrelationEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t replicas = 0;
};

using FlowFunctional = std::function<std::complex<double>(const FlowPath&)>;

// Draw the coupled pair: first ~ base law; each factor of second equals the
// corresponding factor of first where the mask is clear and is an
// independent fresh draw where it is set; mask bits are i.i.d.
// Bernoulli(1 - rho). Both marginals are exactly the base law.
CoupledPair couple(Model model, const ModelParams& params, std::int64_t n_steps,
                   double rho, Rng& rng);

// Monte Carlo mean of (f o first) * conj(f o second) over `replicas`
// independent couplings, reported with a leave-one-out jackknife standard
// error. Replica r uses the stream (seed, r), so results do not depend on
// thread count. Throws if the functional is empirically degenerate
// (identical value on every replica).
CorrelationEstimate estimate_correlation(const FlowFunctional& functional,
                                         Model model, const ModelParams& params,
                                         std::int64_t n_steps, double rho,
                                         std::int64_t replicas, std::uint64_t seed,
                                         int threads = 1);

// Exact per-factor correlation factor |E f|^2 + rho Var f for a finite step
// law with per-atom values.
double exact_step_factor(std::span<const double> probs,
                         std::span<const std::complex<double>> values, double rho);

// One estimate per rho over a shared set of replicas. Within a replica the
// base flow, the redraw candidates, and the per-factor coupling uniforms are
// drawn once and reused across the grid (common random numbers; the resample
// sets are nested along the grid).
std::vector<std::pair<double, CorrelationEstimate>> sensitivity_curve(
    const FlowFunctional& functional, Model model, const ModelParams& params,
    std::int64_t n_steps, std::span<const double> rho_grid, std::int64_t replicas,
    std::uint64_t seed, int threads = 1);

// CSV rows (rho, estimate, std_error, replicas).
std::string sensitivity_curve_csv(
    const std::vector<std::pair<double, CorrelationEstimate>>& curve);

}  // namespace flownoise
