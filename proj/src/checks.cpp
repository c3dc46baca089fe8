#include "flownoise/checks.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "flownoise/flow.hpp"
#include "flownoise/perturb.hpp"
#include "flownoise/rng.hpp"
#include "flownoise/semigroup.hpp"
#include "flownoise/sticky_exact.hpp"

namespace flownoise::checks {

namespace {

CheckResult result(const std::string& name, bool pass, const std::string& detail) {
    return {name, pass, detail};
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << x;
    return os.str();
}

CoalElem<std::int64_t> random_coal(Rng& rng) {
    const std::int64_t b = static_cast<std::int64_t>(rng.uniform_int(6));
    const std::int64_t a = static_cast<std::int64_t>(rng.uniform_int(13)) - 6;
    return CoalElem<std::int64_t>(std::max(a, -b), b);
}

SplitElem<std::int64_t> random_split(Rng& rng) {
    const auto c = random_coal(rng);
    return SplitElem<std::int64_t>(c.a, c.b,
                                   rng.bernoulli(0.5) ? Sign::plus : Sign::minus);
}

StickyElem<std::int64_t> random_sticky(Rng& rng) {
    const auto ab = random_coal(rng);
    const std::int64_t c =
        static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(ab.a + ab.b + 1)));
    return StickyElem<std::int64_t>(ab.a, ab.b, c);
}

RandomVariable random_rv(Rng& rng, std::int64_t n_factors, std::int64_t max_atoms) {
    FiniteProductSpace space;
    for (std::int64_t t = 0; t < n_factors; ++t) {
        const auto k = 2 + rng.uniform_int(static_cast<std::uint64_t>(max_atoms - 1));
        std::vector<double> probs(k);
        double total = 0.0;
        for (auto& p : probs) {
            p = 0.2 + rng.uniform();
            total += p;
        }
        for (auto& p : probs) p /= total;
        space.factor_probs.push_back(std::move(probs));
    }
    RandomVariable f{space,
                     std::vector<Complex>(static_cast<std::size_t>(space.size()))};
    for (auto& v : f.values) v = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return f;
}

}  // namespace

double coupled_correlation_bruteforce(const RandomVariable& f, double rho) {
    f.validate();
    const auto n = f.space.n_factors();
    const auto size = f.space.size();
    // Per-atom probabilities, flattened per factor for the double loop.
    std::vector<std::vector<double>> probs = f.space.factor_probs;
    double acc = 0.0;
    std::vector<std::int64_t> idx1(static_cast<std::size_t>(n));
    std::vector<std::int64_t> idx2(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < size; ++i) {
        std::int64_t rem = i;
        for (std::int64_t t = n; t-- > 0;) {
            idx1[static_cast<std::size_t>(t)] = rem % f.space.atoms(t);
            rem /= f.space.atoms(t);
        }
        for (std::int64_t j = 0; j < size; ++j) {
            rem = j;
            for (std::int64_t t = n; t-- > 0;) {
                idx2[static_cast<std::size_t>(t)] = rem % f.space.atoms(t);
                rem /= f.space.atoms(t);
            }
            double w = 1.0;
            for (std::int64_t t = 0; t < n; ++t) {
                const double p1 = probs[static_cast<std::size_t>(t)]
                                       [static_cast<std::size_t>(idx1[static_cast<std::size_t>(t)])];
                const double p2 = probs[static_cast<std::size_t>(t)]
                                       [static_cast<std::size_t>(idx2[static_cast<std::size_t>(t)])];
                const double diag =
                    idx1[static_cast<std::size_t>(t)] == idx2[static_cast<std::size_t>(t)]
                        ? rho * p1
                        : 0.0;
                w *= diag + (1.0 - rho) * p1 * p2;
                if (w == 0.0) break;
            }
            if (w == 0.0) continue;
            acc += w * (f.values[static_cast<std::size_t>(i)] *
                        std::conj(f.values[static_cast<std::size_t>(j)]))
                           .real();
        }
    }
    return acc;
}

std::vector<CheckResult> check_semigroups(std::uint64_t seed, std::int64_t instances) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    bool assoc = true, pointwise = true, radial_hom = true, intertwine = true;
    for (std::int64_t i = 0; i < instances && assoc; ++i) {
        {
            const auto x = random_coal(rng), y = random_coal(rng), z = random_coal(rng);
            if (!(compose(compose(x, y), z) == compose(x, compose(y, z)))) assoc = false;
            const std::int64_t p = static_cast<std::int64_t>(rng.uniform_int(10));
            if (apply(compose(x, y), p) != apply(y, apply(x, p))) pointwise = false;
        }
        {
            const auto x = random_split(rng), y = random_split(rng), z = random_split(rng);
            if (!(compose(compose(x, y), z) == compose(x, compose(y, z)))) assoc = false;
            const std::int64_t p = static_cast<std::int64_t>(rng.uniform_int(21)) - 10;
            if (apply(compose(x, y), p) != apply(y, apply(x, p))) pointwise = false;
            if (!(radial_homomorphism(compose(x, y)) ==
                  compose(radial_homomorphism(x), radial_homomorphism(y))))
                radial_hom = false;
            if (std::llabs(apply(x, p)) != apply(radial_homomorphism(x), std::llabs(p)))
                intertwine = false;
        }
        {
            const auto x = random_sticky(rng), y = random_sticky(rng),
                       z = random_sticky(rng);
            if (!(compose(compose(x, y), z) == compose(x, compose(y, z)))) assoc = false;
            const std::int64_t p = static_cast<std::int64_t>(rng.uniform_int(10));
            if (apply(compose(x, y), p) != apply(y, apply(x, p))) pointwise = false;
            if (!(radial_homomorphism(compose(x, y)) ==
                  compose(radial_homomorphism(x), radial_homomorphism(y))))
                radial_hom = false;
        }
        {
            const std::int64_t m = 2 + static_cast<std::int64_t>(rng.uniform_int(7));
            const ZmElem x(m, static_cast<std::int64_t>(rng.uniform_int(9)));
            const ZmElem y(m, static_cast<std::int64_t>(rng.uniform_int(9)));
            const ZmElem z(m, static_cast<std::int64_t>(rng.uniform_int(9)));
            if (!(compose(compose(x, y), z) == compose(x, compose(y, z)))) assoc = false;
            const auto p = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(m)));
            if (apply(compose(x, y), p) != apply(y, apply(x, p))) pointwise = false;
        }
    }
    out.push_back(result("semigroup.associativity", assoc,
                         fmt(static_cast<double>(instances)) + " random integer triples"));
    out.push_back(result("semigroup.pointwise_soundness", pointwise,
                         "apply(compose(x,y),p) == apply(y,apply(x,p))"));
    out.push_back(result("semigroup.radial_homomorphism", radial_hom,
                         "radial commutes with compose"));
    out.push_back(result("semigroup.radial_intertwining", intertwine,
                         "|split map| == coal map of |x|"));

    // Lattice relations. Coalescence: f+ f- = 1 (and f- f+ != 1).
    const CoalElem<std::int64_t> cf_plus(1, 0), cf_minus(-1, 1);
    const bool coal_rel = compose(cf_plus, cf_minus) == CoalElem<std::int64_t>(0, 0) &&
                          !(compose(cf_minus, cf_plus) == CoalElem<std::int64_t>(0, 0));
    // Stickiness: f+ f- = 1, f* f- = 1, f* f+ = f* f*.
    const StickyElem<std::int64_t> sf_star(1, 0, 1), sf_minus(-1, 1, 0), sf_plus(1, 0, 0);
    const StickyElem<std::int64_t> sid(0, 0, 0);
    const bool sticky_rel = compose(sf_plus, sf_minus) == sid &&
                            compose(sf_star, sf_minus) == sid &&
                            compose(sf_star, sf_plus) == compose(sf_star, sf_star);
    out.push_back(result("semigroup.lattice_relations", coal_rel && sticky_rel,
                         "f+f-=1, f*f-=1, f*f+=f*f*"));
    return out;
}

std::vector<CheckResult> check_flows(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    // Cocycle on every semigroup-element model.
    bool cocycle = true;
    for (Model model : {Model::zm_toy, Model::coal_lattice, Model::split_walk,
                        Model::sticky_lattice_4c}) {
        ModelParams params;
        params.m = 5;
        params.lambda = 1.0;
        params.dt = 0.01;
        const FlowPath flow = build_flow(model, params, 40, rng);
        for (int trial = 0; trial < 50; ++trial) {
            const auto r = static_cast<std::int64_t>(rng.uniform_int(41));
            const auto s = r + static_cast<std::int64_t>(rng.uniform_int(
                                   static_cast<std::uint64_t>(41 - r)));
            const auto t = s + static_cast<std::int64_t>(rng.uniform_int(
                                   static_cast<std::uint64_t>(41 - s)));
            if (!(interval_product(flow, r, t) ==
                  compose(interval_product(flow, r, s), interval_product(flow, s, t))))
                cocycle = false;
        }
    }
    out.push_back(result("flow.cocycle", cocycle, "X_{r,t} == X_{r,s} X_{s,t} exactly"));

    // Coalescence dual formulas, exact in integers.
    bool dual = true;
    for (int path = 0; path < 1000 && dual; ++path) {
        const FlowPath flow = build_flow(Model::coal_lattice, {}, 1000, rng);
        std::int64_t a_prefix = 0, min_prefix = 0, b_cur = 0;
        for (std::int64_t t = 1; t <= flow.n_steps(); ++t) {
            const auto& e = std::get<CoalElem<std::int64_t>>(
                std::get<SemigroupElement>(flow.steps[static_cast<std::size_t>(t - 1)]));
            b_cur = std::max(b_cur, e.b - a_prefix);
            a_prefix += e.a;
            min_prefix = std::min(min_prefix, a_prefix);
            if (b_cur != -min_prefix) {
                dual = false;
                break;
            }
        }
        // a_{0,n} + b_{0,n} == max_s a_{s,n} via the same prefix sums.
        const auto prod = std::get<CoalElem<std::int64_t>>(interval_product(
            flow, 0, flow.n_steps()));
        if (prod.a + prod.b != prod.a - min_prefix) dual = false;
    }
    out.push_back(result("flow.coal_dual_formulas", dual,
                         "b_{0,t} == -min_s a_{0,s} on 1000 x 1000 lattice paths"));

    // Radial projection of a split walk is a coalescence walk (scaled by 2).
    bool split_proj = true;
    const FlowPath split_flow = build_flow(Model::split_walk, {}, 200, rng);
    for (const auto& step : split_flow.steps) {
        const auto& e = std::get<SplitElem<std::int64_t>>(std::get<SemigroupElement>(step));
        const auto r = radial_homomorphism(e);
        const bool is_plus = r == CoalElem<std::int64_t>(2, 0);
        const bool is_minus = r == CoalElem<std::int64_t>(-2, 2);
        if (!is_plus && !is_minus) split_proj = false;
    }
    {
        const auto whole = std::get<SplitElem<std::int64_t>>(
            interval_product(split_flow, 0, split_flow.n_steps()));
        SemigroupElement acc = SemigroupElement(CoalElem<std::int64_t>(0, 0));
        for (const auto& step : split_flow.steps)
            acc = compose(acc, radial_homomorphism(std::get<SemigroupElement>(step)));
        if (!(SemigroupElement(radial_homomorphism(whole)) == acc)) split_proj = false;
    }
    out.push_back(result("flow.split_radial_projection", split_proj,
                         "split-walk steps project onto the coal walk"));
    return out;
}

std::vector<CheckResult> check_chaos(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    bool parseval = true, orth = true, sums = true, semigroup_rho = true;
    for (int trial = 0; trial < 10; ++trial) {
        const RandomVariable f = random_rv(rng, 4, 3);
        const auto dec = decompose(f);
        const auto mu = spectral_measure(f);
        if (std::fabs(mu.total() - norm2(f)) > 1e-12 * std::max(1.0, norm2(f)))
            parseval = false;
        RandomVariable total{f.space, std::vector<Complex>(f.values.size())};
        for (const auto& [mask, comp] : dec.components)
            for (std::size_t i = 0; i < comp.values.size(); ++i)
                total.values[i] += comp.values[i];
        for (std::size_t i = 0; i < f.values.size(); ++i)
            if (std::abs(total.values[i] - f.values[i]) > 1e-12) sums = false;
        for (const auto& [c1, g1] : dec.components)
            for (const auto& [c2, g2] : dec.components)
                if (c1 < c2 &&
                    std::abs(inner_product(g1, g2)) > 1e-12 * std::max(1.0, norm2(f)))
                    orth = false;
        const double r1 = 0.3 + 0.5 * rng.uniform();
        const double r2 = 0.2 + 0.7 * rng.uniform();
        const auto lhs = apply_Urho(apply_Urho(f, r1), r2);
        const auto rhs = apply_Urho(f, r1 * r2);
        for (std::size_t i = 0; i < lhs.values.size(); ++i)
            if (std::abs(lhs.values[i] - rhs.values[i]) > 1e-12) semigroup_rho = false;
    }
    out.push_back(result("chaos.parseval", parseval, "sum_C mu_f(C) == ||f||^2"));
    out.push_back(result("chaos.orthogonality", orth, "<Q_C f, Q_D f> == 0 for C != D"));
    out.push_back(result("chaos.components_sum", sums, "sum_C Q_C f == f"));
    out.push_back(result("chaos.urho_semigroup", semigroup_rho,
                         "U^r1 U^r2 == U^(r1 r2)"));

    // Exp/Log round trip and the spectral product law.
    bool explog = true, product_law = true;
    for (int trial = 0; trial < 10; ++trial) {
        FiniteProductSpace space;
        const std::int64_t n = 3 + static_cast<std::int64_t>(rng.uniform_int(3));
        for (std::int64_t t = 0; t < n; ++t) space.factor_probs.push_back({0.5, 0.5});
        std::vector<std::vector<Complex>> g(static_cast<std::size_t>(n));
        for (std::int64_t t = 0; t < n; ++t) {
            const Complex v{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            g[static_cast<std::size_t>(t)] = {v, -v};  // centered under (1/2, 1/2)
        }
        const RandomVariable f = exp_map(space, g);
        const auto g_back = log_map(f);
        const RandomVariable f_back = exp_map(space, g_back);
        for (std::size_t i = 0; i < f.values.size(); ++i)
            if (std::abs(f.values[i] - f_back.values[i]) > 1e-12) explog = false;
        const auto mu = spectral_measure(f);
        for (const auto& [mask, w] : mu.weights) {
            double expected = 1.0;
            for (std::int64_t t = 0; t < n; ++t) {
                const double gt2 = std::norm(g[static_cast<std::size_t>(t)][0]);
                expected *= (mask >> t) & 1 ? gt2 : 1.0;
            }
            if (std::fabs(w - expected) > 1e-12 * std::max(1.0, expected))
                product_law = false;
        }
    }
    out.push_back(result("chaos.exp_log_roundtrip", explog, "Exp(Log f) == f"));
    out.push_back(result("chaos.spectral_product_law", product_law,
                         "mu_{Exp g}(C) == prod_{t in C} ||g_t||^2"));

    // Toy-model eigenvalue law: <U^rho f, f> for the Z_m character.
    bool toy = true;
    for (std::int64_t m : {2, 3, 4}) {
        const std::int64_t n = 5;
        const RandomVariable f = zm_toy_character(m, n);
        const double c2 = std::cos(std::numbers::pi / static_cast<double>(m)) *
                          std::cos(std::numbers::pi / static_cast<double>(m));
        for (double rho : {0.0, 0.35, 0.8, 1.0}) {
            const double got = urho_quadratic_form(f, rho);
            const double expected =
                rho * std::pow(c2 + rho * (1.0 - c2), static_cast<double>(n)) * norm2(f);
            if (std::fabs(got - expected) > 1e-12 * std::max(1.0, std::fabs(expected)))
                toy = false;
        }
    }
    out.push_back(result("chaos.zm_toy_eigenvalue_law", toy,
                         "<U^rho f, f> == rho (cos^2 + rho sin^2)^n"));
    return out;
}

std::vector<CheckResult> check_perturb_exact(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);

    // Dual route: chaos quadratic form vs direct coupled enumeration.
    bool equal = true;
    double worst = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.uniform_int(3));
        const RandomVariable f = random_rv(rng, n, 4);
        for (double rho : {0.0, 0.4, 0.75, 1.0}) {
            const double via_chaos = urho_quadratic_form(f, rho);
            const double via_enum = coupled_correlation_bruteforce(f, rho);
            const double err =
                std::fabs(via_chaos - via_enum) / std::max(1.0, std::fabs(via_enum));
            worst = std::max(worst, err);
            if (err > 1e-12) equal = false;
        }
    }
    out.push_back(result("perturb.bruteforce_equivalence", equal,
                         "max rel err " + fmt(worst)));

    // Product rule: for product functionals the correlation is the product
    // of per-factor exact step factors.
    bool product_rule = true;
    for (int trial = 0; trial < 6; ++trial) {
        const std::int64_t n = 2 + static_cast<std::int64_t>(rng.uniform_int(3));
        FiniteProductSpace space;
        std::vector<std::vector<Complex>> factor_values;
        for (std::int64_t t = 0; t < n; ++t) {
            const auto k = 2 + rng.uniform_int(3);
            std::vector<double> probs(k);
            double tot = 0.0;
            for (auto& p : probs) {
                p = 0.2 + rng.uniform();
                tot += p;
            }
            for (auto& p : probs) p /= tot;
            std::vector<Complex> vals(k);
            for (auto& v : vals) v = Complex{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            space.factor_probs.push_back(probs);
            factor_values.push_back(vals);
        }
        RandomVariable f{space, std::vector<Complex>(static_cast<std::size_t>(space.size()),
                                                     Complex{1.0, 0.0})};
        for (std::int64_t i = 0; i < space.size(); ++i) {
            std::int64_t rem = i;
            for (std::int64_t t = n; t-- > 0;) {
                const auto atom = rem % space.atoms(t);
                rem /= space.atoms(t);
                f.values[static_cast<std::size_t>(i)] *=
                    factor_values[static_cast<std::size_t>(t)][static_cast<std::size_t>(atom)];
            }
        }
        for (double rho : {0.1, 0.6, 0.95}) {
            double expected = 1.0;
            for (std::int64_t t = 0; t < n; ++t)
                expected *= exact_step_factor(space.factor_probs[static_cast<std::size_t>(t)],
                                              factor_values[static_cast<std::size_t>(t)], rho);
            const double got = coupled_correlation_bruteforce(f, rho);
            if (std::fabs(got - expected) > 1e-12 * std::max(1.0, std::fabs(expected)))
                product_rule = false;
        }
    }
    out.push_back(result("perturb.step_factor_product_rule", product_rule,
                         "E[(f o a)(f o b)] == prod |E f_k|^2 + rho Var f_k"));

    // Monotonicity of the exact correlation in rho for a fixed functional.
    bool monotone = true;
    for (int trial = 0; trial < 4; ++trial) {
        const RandomVariable f = random_rv(rng, 3, 3);
        double prev = -1.0;
        for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const double v = coupled_correlation_bruteforce(f, rho);
            if (v < prev - 1e-12) monotone = false;
            prev = v;
        }
    }
    out.push_back(result("perturb.monotonicity_in_rho", monotone,
                         "coupled correlation nondecreasing in rho"));
    return out;
}

std::vector<CheckResult> check_sticky_exact() {
    std::vector<CheckResult> out;

    bool beta_ok = true;
    double worst = 0.0;
    for (double eps : {0.05, 0.1, 0.3, 0.5, 0.9}) {
        for (std::int64_t n = 0; n <= 8; ++n)
            for (std::int64_t k = 0; k <= n; ++k) {
                const auto chk = sticky::beta_moment_identity(n, k, eps);
                worst = std::max(worst, chk.rel_err);
                if (chk.rel_err > 1e-10) beta_ok = false;
            }
    }
    out.push_back(result("sticky.beta_moment_identity", beta_ok,
                         "max rel err " + fmt(worst)));

    bool balance_ok = true, stationary_ok = true, channel_sum_ok = true;
    double worst_balance = 0.0, worst_stat = 0.0;
    for (std::int64_t m = 3; m <= 5; ++m) {
        for (std::int64_t n = 1; n <= 4; ++n) {
            const auto report = sticky::check_detailed_balance(m, n, 0.25);
            worst_balance = std::max(worst_balance, report.max_channel_violation);
            worst_stat = std::max(worst_stat, report.stationarity_violation);
            if (report.max_channel_violation > 1e-10) balance_ok = false;
            if (report.stationarity_violation > 1e-10) stationary_ok = false;
            if (report.max_channel_sum_violation > 1e-10) channel_sum_ok = false;
        }
    }
    out.push_back(result("sticky.detailed_balance_per_channel", balance_ok,
                         "max rel violation " + fmt(worst_balance)));
    out.push_back(result("sticky.stationarity", stationary_ok,
                         "max |mu P - mu| " + fmt(worst_stat)));
    out.push_back(result("sticky.channel_sum", channel_sum_ok,
                         "channels from each source sum to 1"));
    return out;
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
    std::vector<CheckResult> all;
    for (auto&& group :
         {check_semigroups(seed), check_flows(seed + 1), check_chaos(seed + 2),
          check_perturb_exact(seed + 3), check_sticky_exact()}) {
        all.insert(all.end(), group.begin(), group.end());
    }
    return all;
}

}  // namespace flownoise::checks
