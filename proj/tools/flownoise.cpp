// flownoise CLI: simulate the concrete flows, run sensitivity curves,
// spectral analysis, the sticky-flow exact suite, the black-noise variance
// scan, and the exact invariant checks.
//
// Conventions: long-form flags only; the seed is mandatory for every Monte
// Carlo subcommand; identical invocations (including --seed) produce
// byte-identical outputs. Exit codes: 0 success/pass, 1 test failure,
// 2 usage error.

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flownoise/checks.hpp"
#include "flownoise/estimators.hpp"
#include "flownoise/flow.hpp"
#include "flownoise/perturb.hpp"
#include "flownoise/sticky_exact.hpp"

namespace {

using namespace flownoise;

int resolve_threads(int threads_flag) {
    if (threads_flag > 0) return threads_flag;
    if (const char* env = std::getenv("FLOWNOISE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    const auto lines = std::count(content.begin(), content.end(), '\n');
    std::cout << "wrote " << lines << " lines to " << path << "\n";
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> grid;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) grid.push_back(std::stod(item));
    }
    if (grid.empty()) throw CLI::ValidationError("empty grid");
    return grid;
}

ModelParams make_params(std::int64_t m, double lambda, double dt, double eps) {
    ModelParams p;
    p.m = m;
    p.lambda = lambda;
    p.dt = dt;
    p.eps = eps;
    return p;
}

int cmd_simulate(Model model, const ModelParams& params, std::int64_t steps,
                 std::int64_t replicas, std::uint64_t seed,
                 const std::string& starts_csv, const std::string& out_path) {
    std::vector<double> starts = parse_grid(starts_csv);
    std::vector<std::vector<Trajectory>> all;
    all.reserve(static_cast<std::size_t>(replicas));
    for (std::int64_t r = 0; r < replicas; ++r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        const FlowPath flow = build_flow(model, params, steps, rng);
        all.push_back(n_point_motion(flow, starts, rng));
    }
    write_output(out_path, trajectories_to_csv(all));
    return 0;
}

int cmd_sensitivity(Model model, const ModelParams& params, std::int64_t steps,
                    const std::string& rho_grid_csv, std::int64_t replicas,
                    std::uint64_t seed, int threads, const std::string& out_path,
                    const std::string& format) {
    const std::vector<double> rho_grid = parse_grid(rho_grid_csv);
    FlowFunctional functional;
    if (model == Model::zm_toy) {
        const double omega = 2.0 * std::numbers::pi / static_cast<double>(params.m);
        functional = [omega](const FlowPath& flow) {
            const auto x = std::get<ZmElem>(full_product(flow));
            const double angle = omega * static_cast<double>(x.value);
            return std::complex<double>{std::cos(angle), std::sin(angle)};
        };
    } else if (model == Model::arratia_lattice) {
        // Sign statistic of the one-point motion started at 0: which half of
        // the circle the particle ends in.
        const std::int64_t m = params.m;
        functional = [m](const FlowPath& flow) {
            const auto traj = n_point_motion(flow, {0.0});
            const double x = traj[0].positions.back();
            return std::complex<double>{x < static_cast<double>(m) / 2.0 ? 1.0 : -1.0,
                                        0.0};
        };
    } else {
        throw CLI::ValidationError(
            "sensitivity: supported models are zm-toy and arratia-lattice");
    }
    const auto curve = sensitivity_curve(functional, model, params, steps, rho_grid,
                                         replicas, seed, threads);
    if (format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [rho, est] : curve)
            j.push_back({{"rho", rho},
                         {"estimate", est.value},
                         {"std_error", est.std_error},
                         {"replicas", est.replicas}});
        write_output(out_path, j.dump(2) + "\n");
    } else {
        write_output(out_path, sensitivity_curve_csv(curve));
    }
    return 0;
}

int cmd_spectral(const ModelParams& params, std::int64_t steps,
                 const std::string& out_path) {
    const RandomVariable f = zm_toy_character(params.m, steps);
    const SpectralMeasure mu = spectral_measure(f);
    const auto tail_index = steps;  // factors 0..steps-1 are steps, last is tail
    nlohmann::json j = nlohmann::json::parse(spectral_measure_json(mu, tail_index));
    j["model"] = "zm-toy";
    j["m"] = params.m;
    j["steps"] = steps;
    // Per-point inclusion probabilities of the normalized measure.
    auto& incl = j["inclusion_probability"] = nlohmann::json::object();
    for (std::int64_t t = 0; t <= tail_index; ++t) {
        double p = 0.0;
        for (const auto& [mask, weight] : mu.weights)
            if ((mask >> t) & 1) p += weight;
        incl[t == tail_index ? "tail" : std::to_string(t)] = p / mu.total();
    }
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_sticky_verify(std::int64_t m, std::int64_t n, double eps,
                      const std::string& out_path) {
    const auto report = sticky::check_detailed_balance(m, n, eps);
    double worst_beta = 0.0;
    for (std::int64_t nn = 0; nn <= 8; ++nn)
        for (std::int64_t k = 0; k <= nn; ++k)
            worst_beta = std::max(worst_beta,
                                  sticky::beta_moment_identity(nn, k, eps).rel_err);
    nlohmann::json j = nlohmann::json::parse(sticky::detailed_balance_json(report));
    j["beta_moment_max_rel_err"] = worst_beta;
    const bool pass = report.max_channel_violation <= 1e-10 &&
                      report.stationarity_violation <= 1e-10 &&
                      report.max_channel_sum_violation <= 1e-10 && worst_beta <= 1e-10;
    j["verdict"] = pass ? "pass" : "fail";
    write_output(out_path, j.dump(2) + "\n");
    return pass ? 0 : 1;
}

int cmd_blacknoise(const std::string& model_name, std::int64_t m,
                   const std::string& phi_name, const std::string& eps_grid_csv,
                   std::int64_t replicas, std::uint64_t seed, double beta_eps,
                   int threads, const std::string& out_path,
                   const std::string& format) {
    estimators::ScanModel model;
    if (model_name == "arratia") model = estimators::ScanModel::arratia;
    else if (model_name == "classical") model = estimators::ScanModel::classical_control;
    else if (model_name == "sticky-7j") model = estimators::ScanModel::sticky_7j;
    else throw CLI::ValidationError("unknown scan model: " + model_name);
    estimators::PhiKind phi;
    if (phi_name == "distance") phi = estimators::PhiKind::distance_to_point;
    else if (phi_name == "sine") phi = estimators::PhiKind::sine;
    else if (phi_name == "constant") phi = estimators::PhiKind::constant;
    else throw CLI::ValidationError("unknown phi: " + phi_name);
    const auto result = estimators::blacknoise_variance_scan(
        model, m, phi, {}, parse_grid(eps_grid_csv), replicas, seed, beta_eps, threads);
    if (format == "json") write_output(out_path, estimators::report_json(result) + "\n");
    else write_output(out_path, estimators::variance_scan_csv(result));
    std::cerr << "variance/eps trend " << (result.strictly_decreasing ? "" : "NOT ")
              << "strictly decreasing toward small eps (exact trend p = "
              << result.trend_p_value
              << "); this is a finite-scale trend statistic, not an o(eps) proof\n";
    return result.strictly_decreasing ? 0 : 1;
}

int cmd_check(std::uint64_t seed) {
    const auto results = checks::run_all(seed);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.detail
                  << ")\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flownoise: stochastic flows, noise sensitivity, and exact "
                 "chaos analysis at desk scale"};
    app.require_subcommand(1);

    std::string model_name = "zm-toy";
    std::int64_t m = 2;
    std::int64_t steps = 8;
    std::int64_t n_particles = 2;
    std::int64_t replicas = 1000;
    double lambda = 1.0, dt = 0.01, eps = 0.25;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_path, format = "csv", rho_grid = "0.5,0.9,0.99";
    std::string starts = "0", phi = "distance", eps_grid = "";
    std::string scan_model = "arratia";

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed (required; no silent entropy)")
            ->required();
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output file (default: stdout)");
        cmd->add_option("--threads", threads,
                        "worker threads (default: FLOWNOISE_THREADS or 1)");
    };
    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* sim = app.add_subcommand("simulate", "sample flows and emit trajectories");
    sim->add_option("--model", model_name, "model tag")->required();
    sim->add_option("--m", m, "Z_m modulus / circle size");
    sim->add_option("--steps", steps, "number of time steps")->required();
    sim->add_option("--lambda", lambda, "stickiness rate");
    sim->add_option("--dt", dt, "time pitch");
    sim->add_option("--eps", eps, "Beta(eps,eps) parameter");
    sim->add_option("--starts", starts, "comma-separated start points");
    sim->add_option("--replicas", replicas, "independent replicas");
    add_seed(sim);
    add_common(sim);

    auto* sens = app.add_subcommand("sensitivity",
                                    "rho-resampling correlation curve");
    sens->add_option("--model", model_name, "zm-toy or arratia-lattice");
    sens->add_option("--m", m, "Z_m modulus / circle size");
    sens->add_option("--steps", steps, "number of time steps");
    sens->add_option("--rho-grid", rho_grid, "comma-separated rho values");
    sens->add_option("--replicas", replicas, "Monte Carlo replicas");
    add_seed(sens);
    add_common(sens);
    add_format(sens);

    auto* spec = app.add_subcommand("spectral",
                                    "exact spectral measure of the toy character");
    spec->add_option("--model", model_name, "zm-toy")->check(CLI::IsMember({"zm-toy"}));
    spec->add_option("--m", m, "Z_m modulus");
    spec->add_option("--steps", steps, "number of step factors");
    spec->add_option("--out", out_path, "output file (default: stdout)");

    auto* sticky = app.add_subcommand("sticky-verify",
                                      "exact sticky-flow invariants (Beta moments, "
                                      "invariant measure, detailed balance)");
    sticky->add_option("--m", m, "circle size")->required();
    sticky->add_option("--n", n_particles, "particle count")->required();
    sticky->add_option("--eps", eps, "Beta(eps,eps) parameter");
    sticky->add_option("--out", out_path, "output file (default: stdout)");

    auto* black = app.add_subcommand("blacknoise", "variance scan across scales");
    black->add_option("--model", scan_model, "arratia, classical, or sticky-7j");
    black->add_option("--m", m, "circle size")->required();
    black->add_option("--phi", phi, "distance, sine, or constant");
    black->add_option("--eps-grid", eps_grid,
                      "comma-separated continuum eps values (each a whole number "
                      "of lattice steps)")
        ->required();
    black->add_option("--replicas", replicas, "Monte Carlo replicas");
    black->add_option("--beta-eps", eps, "Beta parameter for sticky-7j");
    add_seed(black);
    add_common(black);
    add_format(black);

    auto* chk = app.add_subcommand("check", "run all exact invariant suites");
    chk->add_option("--seed", seed, "seed for the randomized exact checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the usage message on the error stream
        return 2;
    }

    try {
        if (sim->parsed()) {
            const Model model = model_from_name(model_name);
            return cmd_simulate(model, make_params(m, lambda, dt, eps), steps, replicas,
                                seed, starts, out_path);
        }
        if (sens->parsed()) {
            const Model model = model_from_name(model_name);
            return cmd_sensitivity(model, make_params(m, lambda, dt, eps), steps,
                                   rho_grid, replicas, seed, resolve_threads(threads),
                                   out_path, format);
        }
        if (spec->parsed()) return cmd_spectral(make_params(m, lambda, dt, eps), steps,
                                                out_path);
        if (sticky->parsed()) return cmd_sticky_verify(m, n_particles, eps, out_path);
        if (black->parsed())
            return cmd_blacknoise(scan_model, m, phi, eps_grid, replicas, seed, eps,
                                  resolve_threads(threads), out_path, format);
        if (chk->parsed()) return cmd_check(seed);
    } catch (const CLI::ValidationError& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
