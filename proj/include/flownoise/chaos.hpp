#pragma once

// Exact L2 analysis on finite product probability spaces: chaos
// decomposition over subsets of factors, spectral measures, the resampling
// operators U^rho, and the discrete Exp/Log correspondence between centered
// additive and unit-mean multiplicative functionals.
//
// Everything here is dense and exact (up to double rounding); the module is
// the small-instance oracle the Monte Carlo side is checked against. Subsets
// of factors are encoded as bitmasks, factor 0 = bit 0. Feasibility guard:
// the product of atom counts must stay <= 2^24 tensor entries, and subset
// enumeration requires <= 24 factors.

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace flownoise {

using Complex = std::complex<double>;

struct FiniteProductSpace {
    // factor_probs[t] is the probability vector of factor t; entries must be
    // positive and sum to 1.
    std::vector<std::vector<double>> factor_probs;

    std::int64_t n_factors() const {
        return static_cast<std::int64_t>(factor_probs.size());
    }
    std::int64_t atoms(std::int64_t t) const {
        return static_cast<std::int64_t>(factor_probs[static_cast<std::size_t>(t)].size());
    }
    std::int64_t size() const;  // product of atom counts
    void validate() const;

    bool operator==(const FiniteProductSpace&) const = default;
};

// Complex-valued tensor indexed by one atom per factor, row-major with the
// LAST factor fastest.
struct RandomVariable {
    FiniteProductSpace space;
    std::vector<Complex> values;

    void validate() const;
};

struct ChaosDecomposition {
    // Component Q_C f for every subset C (bitmask over factor indices).
    std::map<std::uint64_t, RandomVariable> components;
};

struct SpectralMeasure {
    std::map<std::uint64_t, double> weights;  // subset -> ||Q_C f||^2
    double total() const;                     // == ||f||^2
};

// ---------------------------------------------------------------------------
// Basic expectations

// E[f g-bar] under the product measure.
Complex inner_product(const RandomVariable& f, const RandomVariable& g);
double norm2(const RandomVariable& f);

// Average over factor t against its probability vector, broadcast back, so
// the result lives on the same space but is constant along factor t.
RandomVariable expect_factor(const RandomVariable& f, std::int64_t t);

// Conditional expectation onto the factors whose bits are set in keep_mask
// (averages over all other factors).
RandomVariable conditional_expectation(const RandomVariable& f,
                                       std::uint64_t keep_mask);

// ---------------------------------------------------------------------------
// Chaos decomposition and spectra

// Q_C f = (prod_{t not in C} E_t)(prod_{t in C} (I - E_t)) f for all C.
ChaosDecomposition decompose(const RandomVariable& f);

// weights[C] = ||Q_C f||^2; total mass equals ||f||^2 (Parseval).
SpectralMeasure spectral_measure(const RandomVariable& f);

// U^rho f = sum_C rho^|C| Q_C f, computed factor-by-factor as
// (rho I + (1-rho) E_t) applied over every factor.
RandomVariable apply_Urho(const RandomVariable& f, double rho);

// <U^rho f, f> without materializing the decomposition.
double urho_quadratic_form(const RandomVariable& f, double rho);

// ---------------------------------------------------------------------------
// Exp / Log

// f = prod_t (1 + g_t). g has one entry per factor: either empty (meaning
// g_t = 0) or an atom-indexed vector that must be centered under the
// factor's probability vector.
RandomVariable exp_map(const FiniteProductSpace& space,
                       const std::vector<std::vector<Complex>>& g);

// Inverse of exp_map on decomposable unit-mean f: recovers the g_t and
// verifies the reconstruction; throws std::domain_error when f does not
// factor as prod(1 + g_t) with E f = 1.
std::vector<std::vector<Complex>> log_map(const RandomVariable& f);

// JSON form: list of {subset: sorted factor indices, weight}, plus the total
// mass. tail_factor, when nonnegative, is emitted as the label "tail".
std::string spectral_measure_json(const SpectralMeasure& mu,
                                  std::int64_t tail_factor = -1);

// ---------------------------------------------------------------------------
// Helpers

RandomVariable tensor_product(const RandomVariable& f, const RandomVariable& g);

// The Z_m toy model as a finite product space: n binary step factors
// (increment 0/1 equiprobably) followed by one uniform tail factor with m
// atoms. The tail is the LAST factor, index n.
FiniteProductSpace zm_toy_space(std::int64_t m, std::int64_t n_steps);

// f = exp(2 pi i X_{0,inf} / m) on the toy space, where X_{0,inf} is the sum
// of all step increments plus the tail value, mod m.
RandomVariable zm_toy_character(std::int64_t m, std::int64_t n_steps);

}  // namespace flownoise
