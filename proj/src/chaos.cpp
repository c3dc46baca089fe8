#include "flownoise/chaos.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

namespace flownoise {

namespace {

constexpr std::int64_t kMaxTensorEntries = std::int64_t{1} << 24;
constexpr std::int64_t kMaxFactorsForSubsets = 24;

std::vector<std::int64_t> strides_of(const FiniteProductSpace& space) {
    const auto n = static_cast<std::size_t>(space.n_factors());
    std::vector<std::int64_t> strides(n, 1);
    for (std::size_t t = n; t-- > 1;)
        strides[t - 1] = strides[t] * space.atoms(static_cast<std::int64_t>(t));
    return strides;
}

double atom_probability(const FiniteProductSpace& space, std::int64_t flat) {
    double p = 1.0;
    for (std::int64_t t = space.n_factors(); t-- > 0;) {
        const auto k = space.atoms(t);
        p *= space.factor_probs[static_cast<std::size_t>(t)]
                               [static_cast<std::size_t>(flat % k)];
        flat /= k;
    }
    return p;
}

}  // namespace

std::int64_t FiniteProductSpace::size() const {
    std::int64_t s = 1;
    for (const auto& probs : factor_probs) {
        s *= static_cast<std::int64_t>(probs.size());
        if (s > kMaxTensorEntries)
            throw std::invalid_argument("FiniteProductSpace: tensor exceeds 2^24 entries");
    }
    return s;
}

void FiniteProductSpace::validate() const {
    if (factor_probs.empty())
        throw std::invalid_argument("FiniteProductSpace: needs at least one factor");
    for (const auto& probs : factor_probs) {
        if (probs.empty())
            throw std::invalid_argument("FiniteProductSpace: empty factor");
        double total = 0.0;
        for (double p : probs) {
            if (!(p > 0.0))
                throw std::invalid_argument("FiniteProductSpace: probabilities must be positive");
            total += p;
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteProductSpace: probabilities must sum to 1");
    }
    (void)size();
}

void RandomVariable::validate() const {
    space.validate();
    if (static_cast<std::int64_t>(values.size()) != space.size())
        throw std::invalid_argument("RandomVariable: tensor shape mismatch");
}

Complex inner_product(const RandomVariable& f, const RandomVariable& g) {
    if (!(f.space == g.space))
        throw std::invalid_argument("inner_product: different spaces");
    Complex acc{0.0, 0.0};
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(f.values.size()); ++i)
        acc += atom_probability(f.space, i) * f.values[static_cast<std::size_t>(i)] *
               std::conj(g.values[static_cast<std::size_t>(i)]);
    return acc;
}

double norm2(const RandomVariable& f) { return inner_product(f, f).real(); }

RandomVariable expect_factor(const RandomVariable& f, std::int64_t t) {
    const auto n = f.space.n_factors();
    if (t < 0 || t >= n) throw std::invalid_argument("expect_factor: bad factor index");
    const auto strides = strides_of(f.space);
    const std::int64_t k = f.space.atoms(t);
    const std::int64_t stride = strides[static_cast<std::size_t>(t)];
    const std::int64_t block = stride * k;
    const auto& probs = f.space.factor_probs[static_cast<std::size_t>(t)];
    RandomVariable out{f.space, std::vector<Complex>(f.values.size())};
    const auto total = static_cast<std::int64_t>(f.values.size());
    for (std::int64_t base = 0; base < total; base += block) {
        for (std::int64_t off = 0; off < stride; ++off) {
            Complex mean{0.0, 0.0};
            for (std::int64_t j = 0; j < k; ++j)
                mean += probs[static_cast<std::size_t>(j)] *
                        f.values[static_cast<std::size_t>(base + j * stride + off)];
            for (std::int64_t j = 0; j < k; ++j)
                out.values[static_cast<std::size_t>(base + j * stride + off)] = mean;
        }
    }
    return out;
}

RandomVariable conditional_expectation(const RandomVariable& f,
                                       std::uint64_t keep_mask) {
    RandomVariable out = f;
    for (std::int64_t t = 0; t < f.space.n_factors(); ++t)
        if ((keep_mask & (std::uint64_t{1} << t)) == 0) out = expect_factor(out, t);
    return out;
}

ChaosDecomposition decompose(const RandomVariable& f) {
    f.validate();
    const auto n = f.space.n_factors();
    if (n > kMaxFactorsForSubsets)
        throw std::invalid_argument("decompose: too many factors for subset enumeration");
    if ((std::int64_t{1} << n) * f.space.size() > (std::int64_t{1} << 26))
        throw std::invalid_argument("decompose: 2^n_factors x tensor size exceeds 2^26");
    ChaosDecomposition result;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        RandomVariable comp = f;
        for (std::int64_t t = 0; t < n; ++t) {
            RandomVariable e = expect_factor(comp, t);
            if (mask & (std::uint64_t{1} << t)) {
                for (std::size_t i = 0; i < comp.values.size(); ++i)
                    comp.values[i] -= e.values[i];
            } else {
                comp = std::move(e);
            }
        }
        result.components.emplace(mask, std::move(comp));
    }
    return result;
}

double SpectralMeasure::total() const {
    double s = 0.0;
    for (const auto& [mask, w] : weights) s += w;
    return s;
}

SpectralMeasure spectral_measure(const RandomVariable& f) {
    const ChaosDecomposition dec = decompose(f);
    SpectralMeasure mu;
    for (const auto& [mask, comp] : dec.components) mu.weights[mask] = norm2(comp);
    return mu;
}

RandomVariable apply_Urho(const RandomVariable& f, double rho) {
    if (!(rho >= 0.0 && rho <= 1.0))
        throw std::invalid_argument("apply_Urho: rho must be in [0,1]");
    f.validate();
    RandomVariable out = f;
    for (std::int64_t t = 0; t < f.space.n_factors(); ++t) {
        RandomVariable e = expect_factor(out, t);
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] = rho * out.values[i] + (1.0 - rho) * e.values[i];
    }
    return out;
}

double urho_quadratic_form(const RandomVariable& f, double rho) {
    return inner_product(apply_Urho(f, rho), f).real();
}

RandomVariable exp_map(const FiniteProductSpace& space,
                       const std::vector<std::vector<Complex>>& g) {
    space.validate();
    const auto n = space.n_factors();
    if (static_cast<std::int64_t>(g.size()) != n)
        throw std::invalid_argument("exp_map: need one (possibly empty) component per factor");
    for (std::int64_t t = 0; t < n; ++t) {
        const auto& gt = g[static_cast<std::size_t>(t)];
        if (gt.empty()) continue;
        if (static_cast<std::int64_t>(gt.size()) != space.atoms(t))
            throw std::invalid_argument("exp_map: component size mismatch");
        Complex mean{0.0, 0.0};
        for (std::int64_t j = 0; j < space.atoms(t); ++j)
            mean += space.factor_probs[static_cast<std::size_t>(t)]
                                      [static_cast<std::size_t>(j)] *
                    gt[static_cast<std::size_t>(j)];
        if (std::abs(mean) > 1e-10)
            throw std::invalid_argument("exp_map: component is not centered");
    }
    RandomVariable out{space, std::vector<Complex>(
                                  static_cast<std::size_t>(space.size()), Complex{1.0, 0.0})};
    const auto strides = strides_of(space);
    for (std::int64_t t = 0; t < n; ++t) {
        const auto& gt = g[static_cast<std::size_t>(t)];
        if (gt.empty()) continue;
        const std::int64_t k = space.atoms(t);
        const std::int64_t stride = strides[static_cast<std::size_t>(t)];
        for (std::int64_t i = 0; i < space.size(); ++i) {
            const std::int64_t atom = (i / stride) % k;
            out.values[static_cast<std::size_t>(i)] *=
                Complex{1.0, 0.0} + gt[static_cast<std::size_t>(atom)];
        }
    }
    return out;
}

std::vector<std::vector<Complex>> log_map(const RandomVariable& f) {
    f.validate();
    const auto n = f.space.n_factors();
    const Complex ef = inner_product(
        f, RandomVariable{f.space, std::vector<Complex>(f.values.size(),
                                                        Complex{1.0, 0.0})});
    if (std::abs(ef - Complex{1.0, 0.0}) > 1e-9)
        throw std::domain_error("log_map: E f must equal 1");
    const auto strides = strides_of(f.space);
    std::vector<std::vector<Complex>> g(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t) {
        // Average over every factor except t; for decomposable unit-mean f
        // this leaves exactly 1 + g_t.
        RandomVariable marginal =
            conditional_expectation(f, std::uint64_t{1} << t);
        const std::int64_t k = f.space.atoms(t);
        const std::int64_t stride = strides[static_cast<std::size_t>(t)];
        std::vector<Complex> gt(static_cast<std::size_t>(k));
        for (std::int64_t j = 0; j < k; ++j)
            gt[static_cast<std::size_t>(j)] =
                marginal.values[static_cast<std::size_t>(j * stride)] - Complex{1.0, 0.0};
        g[static_cast<std::size_t>(t)] = std::move(gt);
    }
    // Rank-one factor test: the reconstruction must reproduce f.
    const RandomVariable recon = exp_map(f.space, g);
    double err2 = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        err2 += std::norm(recon.values[i] - f.values[i]);
    double scale2 = 0.0;
    for (const auto& v : f.values) scale2 += std::norm(v);
    if (err2 > 1e-16 * std::max(scale2, 1.0))
        throw std::domain_error("log_map: f is not decomposable");
    return g;
}

std::string spectral_measure_json(const SpectralMeasure& mu, std::int64_t tail_factor) {
    nlohmann::json j;
    j["total"] = mu.total();
    auto& entries = j["spectral_measure"] = nlohmann::json::array();
    for (const auto& [mask, weight] : mu.weights) {
        if (weight < 1e-15) continue;
        nlohmann::json subset = nlohmann::json::array();
        for (std::int64_t t = 0; t < 64; ++t) {
            if ((mask >> t) & 1) {
                if (t == tail_factor) subset.push_back("tail");
                else subset.push_back(t);
            }
        }
        entries.push_back({{"subset", subset}, {"weight", weight}});
    }
    return j.dump(2);
}

RandomVariable tensor_product(const RandomVariable& f, const RandomVariable& g) {
    f.validate();
    g.validate();
    FiniteProductSpace space = f.space;
    space.factor_probs.insert(space.factor_probs.end(), g.space.factor_probs.begin(),
                              g.space.factor_probs.end());
    RandomVariable out{space, {}};
    out.values.reserve(f.values.size() * g.values.size());
    for (const auto& fv : f.values)
        for (const auto& gv : g.values) out.values.push_back(fv * gv);
    return out;
}

FiniteProductSpace zm_toy_space(std::int64_t m, std::int64_t n_steps) {
    if (m < 2) throw std::invalid_argument("zm_toy_space: m must be >= 2");
    if (n_steps < 1) throw std::invalid_argument("zm_toy_space: n_steps must be >= 1");
    FiniteProductSpace space;
    space.factor_probs.assign(static_cast<std::size_t>(n_steps), {0.5, 0.5});
    space.factor_probs.emplace_back(static_cast<std::size_t>(m),
                                    1.0 / static_cast<double>(m));
    space.validate();
    return space;
}

RandomVariable zm_toy_character(std::int64_t m, std::int64_t n_steps) {
    const FiniteProductSpace space = zm_toy_space(m, n_steps);
    RandomVariable f{space, std::vector<Complex>(static_cast<std::size_t>(space.size()))};
    const double omega = 2.0 * std::numbers::pi / static_cast<double>(m);
    for (std::int64_t i = 0; i < space.size(); ++i) {
        // Last factor (fastest) is the tail; the first n factors are 0/1
        // increments.
        std::int64_t flat = i;
        std::int64_t total = flat % m;
        flat /= m;
        for (std::int64_t t = 0; t < n_steps; ++t) {
            total += flat % 2;
            flat /= 2;
        }
        const double angle = omega * static_cast<double>(total % m);
        f.values[static_cast<std::size_t>(i)] = Complex{std::cos(angle), std::sin(angle)};
    }
    return f;
}

}  // namespace flownoise
