#pragma once

// Discrete-time flow systems built from i.i.d. steps, plus the exact
// continuum increment samplers. A FlowPath is an immutable record of the
// steps of one realization; interval products follow the cocycle law
// X_{r,t} = X_{r,s} X_{s,t} with the library-wide "left acts first"
// composition order.
//
// Models
//   zm_toy             Z_m walk increments (0/1 equiprobable) plus one
//                      independent uniform tail factor standing in for the
//                      increment to the time point at infinity.
//   coal_lattice       coalescence generators f_+ = (1,0), f_- = (-1,1) on
//                      Z_{>=0}, chosen equiprobably.
//   split_walk         splitting walk on half-integers, scaled by 2 so all
//                      arithmetic stays integral: steps are the elements
//                      (2,0,+) and (-2,2,-); positions live on odd integers.
//   sticky_lattice_4c  three-generator stickiness walk: f_- = (-1,1,0) w.p.
//                      1/2, f_* = (1,0,1) w.p. sqrt(dt)/(2 lambda), f_+ =
//                      (1,0,0) with the rest; space pitch sqrt(dt).
//   arratia_lattice    per-site arrows on the circle Z_m; every particle at
//                      site x follows the same arrow, so walks coalesce.
//   sticky_lattice_7j  per-site Beta(eps,eps) coins on Z_m; particles move
//                      right with the site's coin probability, independently
//                      given the coins.
//   coal_brownian      exact continuum coalescence increments over pitch dt.
//   sticky_brownian    exact continuum stickiness increments over pitch dt.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "flownoise/rng.hpp"
#include "flownoise/semigroup.hpp"

namespace flownoise {

enum class Model {
    zm_toy,
    coal_lattice,
    split_walk,
    sticky_lattice_4c,
    arratia_lattice,
    sticky_lattice_7j,
    coal_brownian,
    sticky_brownian,
};

std::string model_name(Model model);
Model model_from_name(const std::string& name);

struct ModelParams {
    std::int64_t m = 0;   // Z_m modulus / circle size (zm_toy, arratia, 7j)
    double lambda = 1.0;  // stickiness rate (sticky_lattice_4c, sticky_brownian)
    double dt = 1.0;      // time pitch (sticky_lattice_4c, *_brownian)
    double eps = 0.5;     // Beta(eps,eps) parameter (sticky_lattice_7j)
};

void validate_params(Model model, const ModelParams& params);

// One time-slice of per-site arrows on Z_m; right[x] != 0 means the arrow
// at site x points to x+1.
struct ArratiaStep {
    std::vector<std::uint8_t> right;
};

// One time-slice of per-site Beta coins on Z_m.
struct CoinStep {
    std::vector<double> theta;
};

using FlowStep = std::variant<SemigroupElement, ArratiaStep, CoinStep>;

struct FlowPath {
    Model model = Model::zm_toy;
    ModelParams params;
    std::vector<FlowStep> steps;
    std::optional<SemigroupElement> tail;  // zm_toy only

    std::int64_t n_steps() const { return static_cast<std::int64_t>(steps.size()); }
};

struct Trajectory {
    double start = 0.0;
    std::vector<double> positions;  // positions[0] == start, length n_steps + 1
};

// ---------------------------------------------------------------------------
// Construction

FlowStep sample_step(Model model, const ModelParams& params, Rng& rng);

// n_steps i.i.d. steps; zm_toy attaches the independent uniform tail factor.
FlowPath build_flow(Model model, const ModelParams& params, std::int64_t n_steps,
                    Rng& rng);

// ---------------------------------------------------------------------------
// Products and motions

// Ordered composition of steps s..t-1 (s == t gives the identity). Defined
// for the semigroup-element models; the field-valued lattice models expose
// their transport separately below.
SemigroupElement interval_product(const FlowPath& flow, std::int64_t s,
                                  std::int64_t t);

// Product over all steps, including the zm_toy tail factor.
SemigroupElement full_product(const FlowPath& flow);

// Composed transport map of the Arratia lattice flow over steps s..t-1:
// result[x] = position at time t of the particle that was at x at time s.
std::vector<std::int64_t> arratia_transport(const FlowPath& flow, std::int64_t s,
                                            std::int64_t t);

// Trajectories of particles driven by the shared steps. The sticky_lattice_7j
// model needs auxiliary randomness (particles are conditionally independent
// given the coins) and is only available through the rng overload.
std::vector<Trajectory> n_point_motion(const FlowPath& flow,
                                       const std::vector<double>& starts);
std::vector<Trajectory> n_point_motion(const FlowPath& flow,
                                       const std::vector<double>& starts, Rng& rng);

// ---------------------------------------------------------------------------
// Exact continuum samplers

// Exact draw from the coalescence increment law over duration t:
// a = sqrt(t) Z and b from the conditional tail P(b > y | a) =
// exp(-2 y (y + a) / t), inverted in closed form.
CoalElem<double> sample_coal_increment(double t, Rng& rng);

// (a, b) as above and c = max(0, a + b - lambda * eta), eta ~ Exp(1).
StickyElem<double> sample_sticky_increment(double t, double lambda, Rng& rng);

// Increments of the circle flow over consecutive grid intervals: Brownian in
// logarithmic time after the instant eps, frozen before it, reduced mod 1.
// grid must be strictly increasing and nonnegative; returns one increment in
// [0,1) per interval (grid.size() - 1 values). The grid points are sampled
// exactly (Gaussian increments with variance log(t/s)); the log-time grid is
// the discretization choice, values at grid points carry no further error.
std::vector<double> sample_circle_flow(double eps, const std::vector<double>& grid,
                                       Rng& rng);

// Same increments before the mod-1 reduction (variance log(t/s) over an
// interval past eps).
std::vector<double> sample_circle_flow_unreduced(double eps,
                                                 const std::vector<double>& grid,
                                                 Rng& rng);

// ---------------------------------------------------------------------------
// Serialization

// CSV rows (replica, time_index, particle, position) for a batch of motions.
std::string trajectories_to_csv(
    const std::vector<std::vector<Trajectory>>& replicas);

}  // namespace flownoise
