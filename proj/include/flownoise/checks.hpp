#pragma once

// Deterministic exact-invariant suites behind the `check` CLI subcommand and
// the acceptance tests. Each check returns pass/fail plus a short detail
// string; nothing here is Monte Carlo.

#include <cstdint>
#include <string>
#include <vector>

#include "flownoise/chaos.hpp"

namespace flownoise::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Independent enumeration of E[(f o alpha)(conj f o beta)] under the
// factor-wise coupling rho * diagonal + (1-rho) * product, by direct double
// sum over all outcome pairs. Exponential cost; the second route of the
// dual-route check against chaos::urho_quadratic_form.
double coupled_correlation_bruteforce(const RandomVariable& f, double rho);

std::vector<CheckResult> check_semigroups(std::uint64_t seed,
                                          std::int64_t instances = 10000);
std::vector<CheckResult> check_flows(std::uint64_t seed);
std::vector<CheckResult> check_chaos(std::uint64_t seed);
std::vector<CheckResult> check_perturb_exact(std::uint64_t seed);
std::vector<CheckResult> check_sticky_exact();

std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace flownoise::checks
