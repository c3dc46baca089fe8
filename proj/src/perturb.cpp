#include "flownoise/perturb.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "flownoise/stats.hpp"

namespace flownoise {

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("rho must be in [0,1]");
}

// Chunked replica loop writing into preallocated slots; the reduction over
// slots is sequential afterwards, so the thread count never changes results.
void run_replicas(std::int64_t replicas, int threads,
                  const std::function<void(std::int64_t)>& body) {
    if (threads <= 1) {
        for (std::int64_t r = 0; r < replicas; ++r) body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t r = w; r < replicas; r += threads) body(r);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

CoupledPair couple(Model model, const ModelParams& params, std::int64_t n_steps,
                   double rho, Rng& rng) {
    check_rho(rho);
    CoupledPair pair;
    pair.rho = rho;
    pair.first = build_flow(model, params, n_steps, rng);
    pair.second = pair.first;
    pair.resampled.assign(static_cast<std::size_t>(n_steps), 0);
    for (std::int64_t k = 0; k < n_steps; ++k) {
        if (rng.bernoulli(1.0 - rho)) {
            pair.resampled[static_cast<std::size_t>(k)] = 1;
            pair.second.steps[static_cast<std::size_t>(k)] =
                sample_step(model, params, rng);
        }
    }
    if (pair.first.tail) {
        // The tail is an ordinary independent factor of the joining and is
        // resampled with the same probability as any step.
        if (rng.bernoulli(1.0 - rho)) {
            pair.tail_resampled = 1;
            pair.second.tail = SemigroupElement(ZmElem(
                params.m, static_cast<std::int64_t>(
                              rng.uniform_int(static_cast<std::uint64_t>(params.m)))));
        }
    }
    return pair;
}

CorrelationEstimate estimate_correlation(const FlowFunctional& functional,
                                         Model model, const ModelParams& params,
                                         std::int64_t n_steps, double rho,
                                         std::int64_t replicas, std::uint64_t seed,
                                         int threads) {
    check_rho(rho);
    if (replicas < 100)
        throw std::invalid_argument("estimate_correlation: need >= 100 replicas");
    std::vector<double> products(static_cast<std::size_t>(replicas));
    std::vector<std::complex<double>> firsts(static_cast<std::size_t>(replicas));
    run_replicas(replicas, threads, [&](std::int64_t r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        const CoupledPair pair = couple(model, params, n_steps, rho, rng);
        const std::complex<double> a = functional(pair.first);
        const std::complex<double> b = functional(pair.second);
        firsts[static_cast<std::size_t>(r)] = a;
        products[static_cast<std::size_t>(r)] = (a * std::conj(b)).real();
    });
    bool degenerate = true;
    for (const auto& v : firsts)
        if (std::abs(v - firsts.front()) > 0.0) {
            degenerate = false;
            break;
        }
    if (degenerate)
        throw std::domain_error(
            "estimate_correlation: functional is degenerate (zero variance)");
    const auto ms = stats::mean_with_jackknife_se(products);
    return {ms.mean, ms.se, replicas};
}

double exact_step_factor(std::span<const double> probs,
                         std::span<const std::complex<double>> values, double rho) {
    check_rho(rho);
    if (probs.size() != values.size() || probs.empty())
        throw std::invalid_argument("exact_step_factor: atom mismatch");
    std::complex<double> mean{0.0, 0.0};
    double second = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        mean += probs[i] * values[i];
        second += probs[i] * std::norm(values[i]);
        total += probs[i];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("exact_step_factor: probabilities must sum to 1");
    const double mean2 = std::norm(mean);
    return mean2 + rho * (second - mean2);
}

std::vector<std::pair<double, CorrelationEstimate>> sensitivity_curve(
    const FlowFunctional& functional, Model model, const ModelParams& params,
    std::int64_t n_steps, std::span<const double> rho_grid, std::int64_t replicas,
    std::uint64_t seed, int threads) {
    for (double rho : rho_grid) check_rho(rho);
    if (rho_grid.empty())
        throw std::invalid_argument("sensitivity_curve: empty rho grid");
    if (replicas < 100)
        throw std::invalid_argument("sensitivity_curve: need >= 100 replicas");
    const std::size_t n_rho = rho_grid.size();
    std::vector<std::vector<double>> products(
        n_rho, std::vector<double>(static_cast<std::size_t>(replicas)));
    run_replicas(replicas, threads, [&](std::int64_t r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        const FlowPath base = build_flow(model, params, n_steps, rng);
        // Fresh factor candidates and coupling uniforms, shared across the
        // whole rho grid.
        std::vector<FlowStep> redraw;
        redraw.reserve(base.steps.size());
        for (std::int64_t k = 0; k < n_steps; ++k)
            redraw.push_back(sample_step(model, params, rng));
        std::optional<SemigroupElement> tail_redraw;
        std::vector<double> u(base.steps.size());
        double u_tail = 0.0;
        for (auto& v : u) v = rng.uniform();
        if (base.tail) {
            tail_redraw = SemigroupElement(ZmElem(
                params.m, static_cast<std::int64_t>(
                              rng.uniform_int(static_cast<std::uint64_t>(params.m)))));
            u_tail = rng.uniform();
        }
        const std::complex<double> a = functional(base);
        FlowPath second = base;
        for (std::size_t g = 0; g < n_rho; ++g) {
            const double rho = rho_grid[g];
            for (std::size_t k = 0; k < u.size(); ++k)
                second.steps[k] = (u[k] < 1.0 - rho) ? redraw[k] : base.steps[k];
            if (base.tail)
                second.tail = (u_tail < 1.0 - rho) ? *tail_redraw : *base.tail;
            const std::complex<double> b = functional(second);
            products[g][static_cast<std::size_t>(r)] = (a * std::conj(b)).real();
        }
    });
    std::vector<std::pair<double, CorrelationEstimate>> curve;
    curve.reserve(n_rho);
    for (std::size_t g = 0; g < n_rho; ++g) {
        const auto ms = stats::mean_with_jackknife_se(products[g]);
        curve.emplace_back(rho_grid[g], CorrelationEstimate{ms.mean, ms.se, replicas});
    }
    return curve;
}

std::string sensitivity_curve_csv(
    const std::vector<std::pair<double, CorrelationEstimate>>& curve) {
    std::ostringstream os;
    os << "rho,estimate,std_error,replicas\n";
    os.precision(17);
    for (const auto& [rho, est] : curve)
        os << rho << ',' << est.value << ',' << est.std_error << ',' << est.replicas
           << '\n';
    return os.str();
}

}  // namespace flownoise
