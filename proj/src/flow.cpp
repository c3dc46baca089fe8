#include "flownoise/flow.hpp"

#include <cmath>
#include <sstream>

namespace flownoise {

namespace {

bool is_semigroup_model(Model model) {
    switch (model) {
        case Model::zm_toy:
        case Model::coal_lattice:
        case Model::split_walk:
        case Model::sticky_lattice_4c:
        case Model::coal_brownian:
        case Model::sticky_brownian:
            return true;
        case Model::arratia_lattice:
        case Model::sticky_lattice_7j:
            return false;
    }
    throw std::invalid_argument("unknown model");
}

double sticky_star_probability(const ModelParams& p) {
    return std::sqrt(p.dt) / (2.0 * p.lambda);
}

const SemigroupElement& step_element(const FlowPath& flow, std::int64_t k) {
    const auto* e = std::get_if<SemigroupElement>(&flow.steps[static_cast<std::size_t>(k)]);
    if (!e)
        throw std::invalid_argument(
            "interval products are defined for semigroup-element models only");
    return *e;
}

SemigroupElement model_identity(const FlowPath& flow) {
    switch (flow.model) {
        case Model::zm_toy:
            return identity(SemigroupKind::zm, flow.params.m);
        case Model::coal_lattice:
            return CoalElem<std::int64_t>(0, 0);
        case Model::split_walk:
            return SplitElem<std::int64_t>(0, 0, Sign::plus);
        case Model::sticky_lattice_4c:
            return StickyElem<std::int64_t>(0, 0, 0);
        case Model::coal_brownian:
            return CoalElem<double>(0.0, 0.0);
        case Model::sticky_brownian:
            return StickyElem<double>(0.0, 0.0, 0.0);
        default:
            throw std::invalid_argument("model has no semigroup identity");
    }
}

}  // namespace

std::string model_name(Model model) {
    switch (model) {
        case Model::zm_toy: return "zm-toy";
        case Model::coal_lattice: return "coal-lattice";
        case Model::split_walk: return "split-walk";
        case Model::sticky_lattice_4c: return "sticky-lattice-4c";
        case Model::arratia_lattice: return "arratia-lattice";
        case Model::sticky_lattice_7j: return "sticky-lattice-7j";
        case Model::coal_brownian: return "coal-brownian";
        case Model::sticky_brownian: return "sticky-brownian";
    }
    throw std::invalid_argument("unknown model");
}

Model model_from_name(const std::string& name) {
    for (Model m : {Model::zm_toy, Model::coal_lattice, Model::split_walk,
                    Model::sticky_lattice_4c, Model::arratia_lattice,
                    Model::sticky_lattice_7j, Model::coal_brownian,
                    Model::sticky_brownian}) {
        if (model_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown model name: " + name);
}

void validate_params(Model model, const ModelParams& params) {
    switch (model) {
        case Model::zm_toy:
            if (params.m < 2) throw std::invalid_argument("zm-toy: m must be >= 2");
            break;
        case Model::coal_lattice:
        case Model::split_walk:
            break;
        case Model::sticky_lattice_4c: {
            if (!(params.lambda > 0.0))
                throw std::invalid_argument("sticky-lattice-4c: lambda must be > 0");
            if (!(params.dt > 0.0))
                throw std::invalid_argument("sticky-lattice-4c: dt must be > 0");
            if (sticky_star_probability(params) > 0.5)
                throw std::invalid_argument(
                    "sticky-lattice-4c: dt too large, sqrt(dt)/(2 lambda) exceeds 1/2");
            break;
        }
        case Model::arratia_lattice:
            if (params.m < 2)
                throw std::invalid_argument("arratia-lattice: m must be >= 2");
            break;
        case Model::sticky_lattice_7j:
            if (params.m < 2)
                throw std::invalid_argument("sticky-lattice-7j: m must be >= 2");
            if (!(params.eps > 0.0 && params.eps < 1.0))
                throw std::invalid_argument("sticky-lattice-7j: eps must be in (0,1)");
            break;
        case Model::coal_brownian:
            if (!(params.dt > 0.0))
                throw std::invalid_argument("coal-brownian: dt must be > 0");
            break;
        case Model::sticky_brownian:
            if (!(params.dt > 0.0))
                throw std::invalid_argument("sticky-brownian: dt must be > 0");
            if (!(params.lambda > 0.0))
                throw std::invalid_argument("sticky-brownian: lambda must be > 0");
            break;
    }
}

FlowStep sample_step(Model model, const ModelParams& params, Rng& rng) {
    validate_params(model, params);
    switch (model) {
        case Model::zm_toy:
            return SemigroupElement(
                ZmElem(params.m, static_cast<std::int64_t>(rng.bernoulli(0.5))));
        case Model::coal_lattice:
            return SemigroupElement(rng.bernoulli(0.5)
                                        ? CoalElem<std::int64_t>(1, 0)
                                        : CoalElem<std::int64_t>(-1, 1));
        case Model::split_walk:
            return SemigroupElement(rng.bernoulli(0.5)
                                        ? SplitElem<std::int64_t>(2, 0, Sign::plus)
                                        : SplitElem<std::int64_t>(-2, 2, Sign::minus));
        case Model::sticky_lattice_4c: {
            const double p_star = sticky_star_probability(params);
            const double u = rng.uniform();
            if (u < 0.5) return SemigroupElement(StickyElem<std::int64_t>(-1, 1, 0));
            if (u < 0.5 + p_star)
                return SemigroupElement(StickyElem<std::int64_t>(1, 0, 1));
            return SemigroupElement(StickyElem<std::int64_t>(1, 0, 0));
        }
        case Model::arratia_lattice: {
            ArratiaStep step;
            step.right.resize(static_cast<std::size_t>(params.m));
            for (auto& r : step.right) r = rng.bernoulli(0.5) ? 1 : 0;
            return step;
        }
        case Model::sticky_lattice_7j: {
            CoinStep step;
            step.theta.resize(static_cast<std::size_t>(params.m));
            for (auto& th : step.theta) th = rng.beta(params.eps, params.eps);
            return step;
        }
        case Model::coal_brownian:
            return SemigroupElement(sample_coal_increment(params.dt, rng));
        case Model::sticky_brownian:
            return SemigroupElement(
                sample_sticky_increment(params.dt, params.lambda, rng));
    }
    throw std::invalid_argument("unknown model");
}

FlowPath build_flow(Model model, const ModelParams& params, std::int64_t n_steps,
                    Rng& rng) {
    validate_params(model, params);
    if (n_steps < 1) throw std::invalid_argument("build_flow: n_steps must be >= 1");
    FlowPath flow;
    flow.model = model;
    flow.params = params;
    flow.steps.reserve(static_cast<std::size_t>(n_steps));
    for (std::int64_t k = 0; k < n_steps; ++k)
        flow.steps.push_back(sample_step(model, params, rng));
    if (model == Model::zm_toy) {
        flow.tail = SemigroupElement(ZmElem(
            params.m,
            static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(params.m)))));
    }
    return flow;
}

SemigroupElement interval_product(const FlowPath& flow, std::int64_t s,
                                  std::int64_t t) {
    if (s < 0 || t > flow.n_steps() || s > t)
        throw std::invalid_argument("interval_product: need 0 <= s <= t <= n");
    if (!is_semigroup_model(flow.model))
        throw std::invalid_argument(
            "interval products are defined for semigroup-element models only");
    SemigroupElement acc = model_identity(flow);
    for (std::int64_t k = s; k < t; ++k) acc = compose(acc, step_element(flow, k));
    return acc;
}

SemigroupElement full_product(const FlowPath& flow) {
    SemigroupElement acc = interval_product(flow, 0, flow.n_steps());
    if (flow.tail) acc = compose(acc, *flow.tail);
    return acc;
}

std::vector<std::int64_t> arratia_transport(const FlowPath& flow, std::int64_t s,
                                            std::int64_t t) {
    if (flow.model != Model::arratia_lattice)
        throw std::invalid_argument("arratia_transport: wrong model");
    if (s < 0 || t > flow.n_steps() || s > t)
        throw std::invalid_argument("arratia_transport: need 0 <= s <= t <= n");
    const std::int64_t m = flow.params.m;
    std::vector<std::int64_t> map(static_cast<std::size_t>(m));
    for (std::int64_t x = 0; x < m; ++x) map[static_cast<std::size_t>(x)] = x;
    for (std::int64_t k = s; k < t; ++k) {
        const auto& step = std::get<ArratiaStep>(flow.steps[static_cast<std::size_t>(k)]);
        for (auto& pos : map) {
            const bool right = step.right[static_cast<std::size_t>(pos)] != 0;
            pos = right ? (pos + 1) % m : (pos + m - 1) % m;
        }
    }
    return map;
}

namespace {

void check_start(const FlowPath& flow, double x) {
    switch (flow.model) {
        case Model::zm_toy:
        case Model::arratia_lattice:
        case Model::sticky_lattice_7j: {
            const double r = std::round(x);
            if (std::fabs(x - r) > 1e-9 || r < 0 || r >= static_cast<double>(flow.params.m))
                throw std::invalid_argument("n_point_motion: start outside Z_m");
            break;
        }
        case Model::coal_lattice:
        case Model::sticky_lattice_4c: {
            const double r = std::round(x);
            if (std::fabs(x - r) > 1e-9 || r < 0)
                throw std::invalid_argument(
                    "n_point_motion: start must be a nonnegative integer");
            break;
        }
        case Model::split_walk: {
            const double r = std::round(x);
            if (std::fabs(x - r) > 1e-9 ||
                std::llabs(static_cast<long long>(r)) % 2 != 1)
                throw std::invalid_argument(
                    "n_point_motion: split-walk starts on odd (scaled half-) integers");
            break;
        }
        case Model::coal_brownian:
        case Model::sticky_brownian:
            if (x < 0.0)
                throw std::invalid_argument("n_point_motion: start must be >= 0");
            break;
    }
}

}  // namespace

std::vector<Trajectory> n_point_motion(const FlowPath& flow,
                                       const std::vector<double>& starts) {
    if (flow.model == Model::sticky_lattice_7j)
        throw std::invalid_argument(
            "n_point_motion: sticky-lattice-7j needs the rng overload");
    for (double x : starts) check_start(flow, x);
    std::vector<Trajectory> out(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        out[i].start = starts[i];
        out[i].positions.reserve(flow.steps.size() + 1);
        out[i].positions.push_back(starts[i]);
    }
    const std::int64_t m = flow.params.m;
    for (const auto& step : flow.steps) {
        for (auto& traj : out) {
            const double x = traj.positions.back();
            double next;
            if (const auto* e = std::get_if<SemigroupElement>(&step)) {
                next = apply(*e, x);
            } else {
                const auto& arr = std::get<ArratiaStep>(step);
                const auto pos = static_cast<std::int64_t>(std::llround(x));
                const bool right = arr.right[static_cast<std::size_t>(pos)] != 0;
                next = static_cast<double>(right ? (pos + 1) % m : (pos + m - 1) % m);
            }
            traj.positions.push_back(next);
        }
    }
    return out;
}

std::vector<Trajectory> n_point_motion(const FlowPath& flow,
                                       const std::vector<double>& starts, Rng& rng) {
    if (flow.model != Model::sticky_lattice_7j) return n_point_motion(flow, starts);
    for (double x : starts) check_start(flow, x);
    std::vector<Trajectory> out(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        out[i].start = starts[i];
        out[i].positions.push_back(starts[i]);
    }
    const std::int64_t m = flow.params.m;
    for (const auto& step : flow.steps) {
        const auto& coins = std::get<CoinStep>(step);
        for (auto& traj : out) {
            const auto pos = static_cast<std::int64_t>(std::llround(traj.positions.back()));
            const bool right = rng.bernoulli(coins.theta[static_cast<std::size_t>(pos)]);
            traj.positions.push_back(
                static_cast<double>(right ? (pos + 1) % m : (pos + m - 1) % m));
        }
    }
    return out;
}

CoalElem<double> sample_coal_increment(double t, Rng& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_coal_increment: t must be > 0");
    const double a = std::sqrt(t) * rng.normal();
    const double e = rng.exponential();
    // Solves exp(-2 b (b + a) / t) = exp(-e); the root is >= max(0, -a).
    const double b = 0.5 * (-a + std::sqrt(a * a + 2.0 * t * e));
    return CoalElem<double>(a, b);
}

StickyElem<double> sample_sticky_increment(double t, double lambda, Rng& rng) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("sample_sticky_increment: lambda must be > 0");
    const CoalElem<double> ab = sample_coal_increment(t, rng);
    const double c = std::max(0.0, ab.a + ab.b - lambda * rng.exponential());
    return StickyElem<double>(ab.a, ab.b, c);
}

std::vector<double> sample_circle_flow_unreduced(double eps,
                                                 const std::vector<double>& grid,
                                                 Rng& rng) {
    if (!(eps > 0.0)) throw std::invalid_argument("sample_circle_flow: eps must be > 0");
    if (grid.size() < 2)
        throw std::invalid_argument("sample_circle_flow: grid needs >= 2 points");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1]) || grid[i] < 0.0)
            throw std::invalid_argument(
                "sample_circle_flow: grid must be nonnegative and increasing");
    std::vector<double> increments(grid.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double s = std::max(grid[i], eps);
        const double t = grid[i + 1];
        if (t <= eps) continue;  // frozen before the instant eps
        increments[i] = std::sqrt(std::log(t / s)) * rng.normal();
    }
    return increments;
}

std::vector<double> sample_circle_flow(double eps, const std::vector<double>& grid,
                                       Rng& rng) {
    std::vector<double> increments = sample_circle_flow_unreduced(eps, grid, rng);
    for (double& y : increments) y -= std::floor(y);
    return increments;
}

std::string trajectories_to_csv(
    const std::vector<std::vector<Trajectory>>& replicas) {
    std::ostringstream os;
    os << "replica,time_index,particle,position\n";
    os.precision(17);
    for (std::size_t r = 0; r < replicas.size(); ++r) {
        for (std::size_t p = 0; p < replicas[r].size(); ++p) {
            const auto& traj = replicas[r][p];
            for (std::size_t k = 0; k < traj.positions.size(); ++k) {
                os << r << ',' << k << ',' << p << ',' << traj.positions[k] << '\n';
            }
        }
    }
    return os.str();
}

}  // namespace flownoise
