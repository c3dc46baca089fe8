#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "flownoise/flow.hpp"
#include "flownoise/stats.hpp"

using namespace flownoise;

TEST_CASE("step laws match the model probabilities") {
    Rng rng(41);
    SUBCASE("coal lattice: f+ and f- equiprobable") {
        std::int64_t plus = 0;
        const std::int64_t n = 100000;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto e = std::get<CoalElem<std::int64_t>>(
                std::get<SemigroupElement>(sample_step(Model::coal_lattice, {}, rng)));
            if (e == CoalElem<std::int64_t>(1, 0)) ++plus;
            else CHECK(e == CoalElem<std::int64_t>(-1, 1));
        }
        const double p = static_cast<double>(plus) / static_cast<double>(n);
        CHECK(std::fabs(p - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
    }
    SUBCASE("sticky lattice: probabilities 1/2, sqrt(dt)/(2 lambda), rest") {
        ModelParams params;
        params.lambda = 1.0;
        params.dt = 0.01;
        std::int64_t minus = 0, star = 0, plus = 0;
        const std::int64_t n = 200000;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto e = std::get<StickyElem<std::int64_t>>(std::get<SemigroupElement>(
                sample_step(Model::sticky_lattice_4c, params, rng)));
            if (e == StickyElem<std::int64_t>(-1, 1, 0)) ++minus;
            else if (e == StickyElem<std::int64_t>(1, 0, 1)) ++star;
            else if (e == StickyElem<std::int64_t>(1, 0, 0)) ++plus;
            else FAIL("unexpected step element");
        }
        const auto frac = [n](std::int64_t k) {
            return static_cast<double>(k) / static_cast<double>(n);
        };
        const auto band = [n](double p) {
            return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        };
        CHECK(std::fabs(frac(minus) - 0.5) < band(0.5));
        CHECK(std::fabs(frac(star) - 0.05) < band(0.05));
        CHECK(std::fabs(frac(plus) - 0.45) < band(0.45));
    }
    SUBCASE("zm toy: increments 0 or 1 with probability 1/2") {
        ModelParams params;
        params.m = 3;
        std::int64_t ones = 0;
        const std::int64_t n = 100000;
        for (std::int64_t i = 0; i < n; ++i) {
            const auto e = std::get<ZmElem>(
                std::get<SemigroupElement>(sample_step(Model::zm_toy, params, rng)));
            CHECK((e.value == 0 || e.value == 1));
            ones += e.value;
        }
        const double p = static_cast<double>(ones) / static_cast<double>(n);
        CHECK(std::fabs(p - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
    }
    SUBCASE("dt too large for the sticky model is rejected") {
        ModelParams params;
        params.lambda = 0.5;
        params.dt = 1.5;  // sqrt(1.5) > 2 * 0.5 * 0.5
        CHECK_THROWS_AS(sample_step(Model::sticky_lattice_4c, params, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("build_flow shape and degenerate input") {
    Rng rng(5);
    ModelParams params;
    params.m = 2;
    const FlowPath flow = build_flow(Model::zm_toy, params, 4, rng);
    CHECK(flow.n_steps() == 4);
    REQUIRE(flow.tail.has_value());
    for (const auto& step : flow.steps) {
        const auto& e = std::get<ZmElem>(std::get<SemigroupElement>(step));
        CHECK((e.value == 0 || e.value == 1));
    }
    CHECK_THROWS_AS(build_flow(Model::coal_lattice, {}, 0, rng), std::invalid_argument);

    // Tail is uniform on Z_m: frequency check over a batch of flows.
    std::int64_t zero_tail = 0;
    const std::int64_t n = 20000;
    for (std::int64_t i = 0; i < n; ++i) {
        const FlowPath f = build_flow(Model::zm_toy, params, 1, rng);
        if (std::get<ZmElem>(*f.tail).value == 0) ++zero_tail;
    }
    const double p = static_cast<double>(zero_tail) / static_cast<double>(n);
    CHECK(std::fabs(p - 0.5) < 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
}

TEST_CASE("interval products: identity, fold, cocycle") {
    Rng rng(17);
    const FlowPath flow = build_flow(Model::coal_lattice, {}, 60, rng);
    CHECK(interval_product(flow, 7, 7) ==
          SemigroupElement(CoalElem<std::int64_t>(0, 0)));
    SemigroupElement fold = SemigroupElement(CoalElem<std::int64_t>(0, 0));
    for (const auto& step : flow.steps)
        fold = compose(fold, std::get<SemigroupElement>(step));
    CHECK(interval_product(flow, 0, flow.n_steps()) == fold);
    for (int trial = 0; trial < 200; ++trial) {
        const auto r = static_cast<std::int64_t>(rng.uniform_int(61));
        const auto s =
            r + static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(61 - r)));
        const auto t =
            s + static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(61 - s)));
        CHECK(interval_product(flow, r, t) ==
              compose(interval_product(flow, r, s), interval_product(flow, s, t)));
    }
    CHECK_THROWS_AS(interval_product(flow, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(interval_product(flow, 0, 61), std::invalid_argument);
}

TEST_CASE("coalescing lattice dual formulas, exact") {
    Rng rng(23);
    for (int path = 0; path < 50; ++path) {
        const FlowPath flow = build_flow(Model::coal_lattice, {}, 400, rng);
        std::int64_t prefix_a = 0, min_prefix = 0;
        for (std::int64_t t = 1; t <= flow.n_steps(); ++t) {
            const auto prod = std::get<CoalElem<std::int64_t>>(interval_product(flow, 0, t));
            const auto& e = std::get<CoalElem<std::int64_t>>(
                std::get<SemigroupElement>(flow.steps[static_cast<std::size_t>(t - 1)]));
            prefix_a += e.a;
            min_prefix = std::min(min_prefix, prefix_a);
            CHECK(prod.b == -min_prefix);                     // b_{0,t} = -min_s a_{0,s}
            CHECK(prod.a + prod.b == prefix_a - min_prefix);  // = max_s a_{s,t}
        }
    }
}

TEST_CASE("two-point motion of the coalescing lattice walk") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const FlowPath flow = build_flow(Model::coal_lattice, {}, 300, rng);
        const auto traj = n_point_motion(flow, {0.0, 4.0});
        bool met = false;
        double prev_gap = 4.0;
        for (std::size_t k = 0; k < traj[0].positions.size(); ++k) {
            const double gap = traj[1].positions[k] - traj[0].positions[k];
            CHECK(gap >= 0.0);
            CHECK(gap <= prev_gap);  // distance never increases
            if (met) CHECK(gap == 0.0);
            if (gap == 0.0) met = true;
            prev_gap = gap;
        }
    }
}

TEST_CASE("arratia lattice: shared arrows coalesce") {
    Rng rng(37);
    ModelParams params;
    params.m = 16;
    const FlowPath flow = build_flow(Model::arratia_lattice, params, 100, rng);
    const auto same = n_point_motion(flow, {3.0, 3.0});
    CHECK(same[0].positions == same[1].positions);

    // Transport maps compose along the cocycle.
    const auto full = arratia_transport(flow, 0, 100);
    const auto left = arratia_transport(flow, 0, 40);
    const auto right = arratia_transport(flow, 40, 100);
    for (std::int64_t x = 0; x < params.m; ++x)
        CHECK(full[static_cast<std::size_t>(x)] ==
              right[static_cast<std::size_t>(left[static_cast<std::size_t>(x)])]);

    // Once two walkers share a site they stay together.
    const auto pair = n_point_motion(flow, {2.0, 4.0});
    bool met = false;
    for (std::size_t k = 0; k < pair[0].positions.size(); ++k) {
        if (met) CHECK(pair[0].positions[k] == pair[1].positions[k]);
        if (pair[0].positions[k] == pair[1].positions[k]) met = true;
    }
}

TEST_CASE("sticky lattice (Beta coins): particles separate after meeting") {
    Rng rng(43);
    ModelParams params;
    params.m = 8;
    params.eps = 0.3;
    std::int64_t separations = 0;
    for (int run = 0; run < 10000 && separations == 0; ++run) {
        const FlowPath flow = build_flow(Model::sticky_lattice_7j, params, 20, rng);
        const auto traj = n_point_motion(flow, {1.0, 1.0}, rng);
        for (std::size_t k = 0; k < traj[0].positions.size(); ++k)
            if (traj[0].positions[k] != traj[1].positions[k]) {
                ++separations;
                break;
            }
    }
    CHECK(separations > 0);
    CHECK_THROWS_AS(n_point_motion(build_flow(Model::sticky_lattice_7j, params, 2, rng),
                                   {1.0}),
                    std::invalid_argument);
}

TEST_CASE("split walk projects onto the coalescence walk, stream-exactly") {
    // The same RNG stream drives both walks; projecting every split step
    // must reproduce the coal walk's steps scaled by 2.
    Rng rng_split(81), rng_coal(81);
    const FlowPath split_flow = build_flow(Model::split_walk, {}, 500, rng_split);
    const FlowPath coal_flow = build_flow(Model::coal_lattice, {}, 500, rng_coal);
    for (std::int64_t k = 0; k < 500; ++k) {
        const auto s = radial_homomorphism(std::get<SplitElem<std::int64_t>>(
            std::get<SemigroupElement>(split_flow.steps[static_cast<std::size_t>(k)])));
        const auto c = std::get<CoalElem<std::int64_t>>(
            std::get<SemigroupElement>(coal_flow.steps[static_cast<std::size_t>(k)]));
        CHECK(s == CoalElem<std::int64_t>(2 * c.a, 2 * c.b));
    }
}

TEST_CASE("split walk: radial part is the coalescence motion, exactly") {
    Rng rng(47);
    const FlowPath flow = build_flow(Model::split_walk, {}, 80, rng);
    CHECK_THROWS_AS(n_point_motion(flow, {2.0}), std::invalid_argument);
    const auto traj = n_point_motion(flow, {5.0});
    double radial = 5.0;
    for (std::size_t k = 1; k < traj[0].positions.size(); ++k) {
        const auto& e = std::get<SplitElem<std::int64_t>>(
            std::get<SemigroupElement>(flow.steps[k - 1]));
        radial = apply(radial_homomorphism(SplitElem<double>(
                           static_cast<double>(e.a), static_cast<double>(e.b), e.sign)),
                       radial);
        CHECK(std::fabs(traj[0].positions[k]) == radial);
    }
}

TEST_CASE("continuum-increment flows satisfy the cocycle within 1e-12") {
    Rng rng(79);
    ModelParams params;
    params.dt = 0.05;
    params.lambda = 0.7;
    for (Model model : {Model::coal_brownian, Model::sticky_brownian}) {
        const FlowPath flow = build_flow(model, params, 40, rng);
        for (int trial = 0; trial < 100; ++trial) {
            const auto r = static_cast<std::int64_t>(rng.uniform_int(41));
            const auto s = r + static_cast<std::int64_t>(
                                   rng.uniform_int(static_cast<std::uint64_t>(41 - r)));
            const auto t = s + static_cast<std::int64_t>(
                                   rng.uniform_int(static_cast<std::uint64_t>(41 - s)));
            const auto whole = interval_product(flow, r, t);
            const auto split_prod =
                compose(interval_product(flow, r, s), interval_product(flow, s, t));
            if (model == Model::coal_brownian) {
                const auto& x = std::get<CoalElem<double>>(whole);
                const auto& y = std::get<CoalElem<double>>(split_prod);
                CHECK(std::fabs(x.a - y.a) <= 1e-12);
                CHECK(std::fabs(x.b - y.b) <= 1e-12);
            } else {
                const auto& x = std::get<StickyElem<double>>(whole);
                const auto& y = std::get<StickyElem<double>>(split_prod);
                CHECK(std::fabs(x.a - y.a) <= 1e-12);
                CHECK(std::fabs(x.b - y.b) <= 1e-12);
                CHECK(std::fabs(x.c - y.c) <= 1e-12);
            }
        }
    }
}

TEST_CASE("exact coalescence increment sampler") {
    Rng rng(53);
    const double t = 0.7;
    const std::int64_t n = 200000;
    double sum_a = 0.0, sum_a2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto inc = sample_coal_increment(t, rng);
        CHECK(inc.b >= 0.0);
        CHECK(inc.a + inc.b >= 0.0);
        sum_a += inc.a;
        sum_a2 += inc.a * inc.a;
    }
    const double mean = sum_a / static_cast<double>(n);
    const double var = sum_a2 / static_cast<double>(n) - mean * mean;
    // a is N(0, t): mean and variance within 3 SE.
    CHECK(std::fabs(mean) < 3.0 * std::sqrt(t / static_cast<double>(n)));
    CHECK(std::fabs(var - t) < 3.0 * t * std::sqrt(2.0 / static_cast<double>(n)));
    CHECK_THROWS_AS(sample_coal_increment(0.0, rng), std::invalid_argument);
}

TEST_CASE("coalescence increment density matches the running-minimum walk oracle") {
    // Oracle: (final value, -running minimum) of a fine Gaussian walk.
    Rng rng(59);
    const double t = 1.0;
    const std::int64_t walk_steps = 10000;
    const std::int64_t n_oracle = 4000, n_sampler = 40000;
    const double sd = std::sqrt(t / static_cast<double>(walk_steps));
    const std::vector<double> a_edges{-0.6, 0.0, 0.6};
    const std::vector<double> b_edges{0.2, 0.5, 1.0};
    const auto cell = [&](double a, double b) {
        std::size_t ia = 0, ib = 0;
        while (ia < a_edges.size() && a > a_edges[ia]) ++ia;
        while (ib < b_edges.size() && b > b_edges[ib]) ++ib;
        return ia * (b_edges.size() + 1) + ib;
    };
    std::vector<std::int64_t> counts_oracle(16, 0), counts_sampler(16, 0);
    for (std::int64_t i = 0; i < n_oracle; ++i) {
        double pos = 0.0, min_pos = 0.0;
        for (std::int64_t s = 0; s < walk_steps; ++s) {
            pos += sd * rng.normal();
            min_pos = std::min(min_pos, pos);
        }
        ++counts_oracle[cell(pos, -min_pos)];
    }
    for (std::int64_t i = 0; i < n_sampler; ++i) {
        const auto inc = sample_coal_increment(t, rng);
        ++counts_sampler[cell(inc.a, inc.b)];
    }
    // Two-sample chi^2 across the cells.
    double stat = 0.0;
    const double k1 = std::sqrt(static_cast<double>(n_oracle) / n_sampler);
    const double k2 = 1.0 / k1;
    int df = -1;
    for (std::size_t c = 0; c < 16; ++c) {
        const double o = static_cast<double>(counts_oracle[c]);
        const double s = static_cast<double>(counts_sampler[c]);
        if (o + s == 0.0) continue;
        ++df;
        const double d = k2 * o - k1 * s;
        stat += d * d / (o + s);
    }
    CHECK(stats::chi2_sf(stat, static_cast<double>(df)) > 0.01);
}

TEST_CASE("sticky increment: atom at c = 0 and support") {
    Rng rng(61);
    std::int64_t zeros = 0;
    const std::int64_t n = 50000;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto inc = sample_sticky_increment(0.5, 1.0, rng);
        CHECK(inc.c >= 0.0);
        CHECK(inc.c <= inc.a + inc.b);
        if (inc.c == 0.0) ++zeros;
    }
    CHECK(zeros > 0);  // singular part concentrated on the plane c = 0
    CHECK(zeros < n);
    CHECK_THROWS_AS(sample_sticky_increment(1.0, 0.0, rng), std::invalid_argument);
}

TEST_CASE("circle flow increments") {
    Rng rng(67);
    SUBCASE("frozen before the instant eps") {
        const auto inc = sample_circle_flow(0.5, {0.0, 0.2, 0.4}, rng);
        CHECK(inc[0] == 0.0);
        CHECK(inc[1] == 0.0);
    }
    SUBCASE("unreduced variance is log(t/s)") {
        const double eps = 0.01, s = 0.2, t = 0.8;
        const std::int64_t n = 100000;
        std::vector<double> xs(static_cast<std::size_t>(n));
        for (std::int64_t i = 0; i < n; ++i)
            xs[static_cast<std::size_t>(i)] =
                sample_circle_flow_unreduced(eps, {s, t}, rng)[0];
        const double var = stats::variance(xs);
        const double target = std::log(t / s);
        CHECK(std::fabs(var - target) <
              3.0 * target * std::sqrt(2.0 / static_cast<double>(n)));
    }
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(sample_circle_flow(0.1, {0.5, 0.5}, rng), std::invalid_argument);
        CHECK_THROWS_AS(sample_circle_flow(0.0, {0.1, 0.2}, rng), std::invalid_argument);
    }
}

TEST_CASE("sticky lattice one-point motion: sticky origin, shrinking dwell") {
    // Fraction of time at the origin stays bounded away from zero while the
    // longest single visit shrinks with the pitch.
    Rng rng(71);
    const double lambda = 1.0;
    const double horizon = 1.0;
    double prev_dwell = 1e30;
    for (const double dt : {1e-2, 1e-3, 1e-4}) {
        ModelParams params;
        params.lambda = lambda;
        params.dt = dt;
        const auto steps = static_cast<std::int64_t>(horizon / dt);
        double frac_sum = 0.0, dwell_sum = 0.0;
        const int runs = 20;
        for (int run = 0; run < runs; ++run) {
            const FlowPath flow = build_flow(Model::sticky_lattice_4c, params, steps, rng);
            const auto traj = n_point_motion(flow, {0.0});
            std::int64_t at_zero = 0, dwell = 0, max_dwell = 0;
            for (double x : traj[0].positions) {
                if (x == 0.0) {
                    ++at_zero;
                    ++dwell;
                    max_dwell = std::max(max_dwell, dwell);
                } else {
                    dwell = 0;
                }
            }
            frac_sum += static_cast<double>(at_zero) / static_cast<double>(steps + 1);
            dwell_sum += static_cast<double>(max_dwell) * dt;
        }
        const double frac = frac_sum / runs;
        const double mean_dwell = dwell_sum / runs;
        CHECK(frac > 0.05);
        CHECK(mean_dwell < prev_dwell);
        prev_dwell = mean_dwell;
    }
}

TEST_CASE("trajectory CSV serialization") {
    Rng rng(73);
    const FlowPath flow = build_flow(Model::coal_lattice, {}, 3, rng);
    const auto csv = trajectories_to_csv({n_point_motion(flow, {0.0, 2.0})});
    CHECK(csv.rfind("replica,time_index,particle,position\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);
}
