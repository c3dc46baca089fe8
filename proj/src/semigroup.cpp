#include "flownoise/semigroup.hpp"

#include <cmath>

namespace flownoise {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void mismatch() {
    throw std::invalid_argument("compose: elements from different semigroups");
}

}  // namespace

std::string kind_name(SemigroupKind kind) {
    switch (kind) {
        case SemigroupKind::zm: return "zm";
        case SemigroupKind::coalescence: return "coalescence";
        case SemigroupKind::splitting: return "splitting";
        case SemigroupKind::stickiness: return "stickiness";
    }
    throw std::invalid_argument("kind_name: unsupported semigroup kind");
}

SemigroupElement identity(SemigroupKind kind, std::int64_t m) {
    switch (kind) {
        case SemigroupKind::zm:
            return ZmElem(m, 0);
        case SemigroupKind::coalescence:
            return CoalElem<std::int64_t>(0, 0);
        case SemigroupKind::splitting:
            return SplitElem<std::int64_t>(0, 0, Sign::plus);
        case SemigroupKind::stickiness:
            return StickyElem<std::int64_t>(0, 0, 0);
    }
    throw std::invalid_argument("identity: unsupported semigroup kind");
}

SemigroupElement identity_like(const SemigroupElement& e) {
    return std::visit(
        overloaded{
            [](const ZmElem& z) -> SemigroupElement { return ZmElem(z.m, 0); },
            [](const CoalElem<std::int64_t>&) -> SemigroupElement {
                return CoalElem<std::int64_t>(0, 0);
            },
            [](const CoalElem<double>&) -> SemigroupElement {
                return CoalElem<double>(0.0, 0.0);
            },
            [](const SplitElem<std::int64_t>&) -> SemigroupElement {
                return SplitElem<std::int64_t>(0, 0, Sign::plus);
            },
            [](const SplitElem<double>&) -> SemigroupElement {
                return SplitElem<double>(0.0, 0.0, Sign::plus);
            },
            [](const StickyElem<std::int64_t>&) -> SemigroupElement {
                return StickyElem<std::int64_t>(0, 0, 0);
            },
            [](const StickyElem<double>&) -> SemigroupElement {
                return StickyElem<double>(0.0, 0.0, 0.0);
            }},
        e);
}

SemigroupKind kind_of(const SemigroupElement& e) {
    return std::visit(
        overloaded{
            [](const ZmElem&) { return SemigroupKind::zm; },
            [](const CoalElem<std::int64_t>&) { return SemigroupKind::coalescence; },
            [](const CoalElem<double>&) { return SemigroupKind::coalescence; },
            [](const SplitElem<std::int64_t>&) { return SemigroupKind::splitting; },
            [](const SplitElem<double>&) { return SemigroupKind::splitting; },
            [](const StickyElem<std::int64_t>&) { return SemigroupKind::stickiness; },
            [](const StickyElem<double>&) { return SemigroupKind::stickiness; }},
        e);
}

SemigroupElement compose(const SemigroupElement& x, const SemigroupElement& y) {
    if (x.index() != y.index()) mismatch();
    return std::visit(
        [&y](const auto& xv) -> SemigroupElement {
            using T = std::decay_t<decltype(xv)>;
            return compose(xv, std::get<T>(y));
        },
        x);
}

double apply(const SemigroupElement& e, double point) {
    return std::visit(
        overloaded{
            [point](const ZmElem& z) -> double {
                const double r = std::round(point);
                if (std::fabs(point - r) > 1e-9)
                    throw std::invalid_argument("apply: Z_m point must be an integer");
                return static_cast<double>(apply(z, static_cast<std::int64_t>(r)));
            },
            [point](const CoalElem<std::int64_t>& c) -> double {
                return apply(CoalElem<double>(static_cast<double>(c.a),
                                              static_cast<double>(c.b)),
                             point);
            },
            [point](const CoalElem<double>& c) -> double { return apply(c, point); },
            [point](const SplitElem<std::int64_t>& s) -> double {
                return apply(SplitElem<double>(static_cast<double>(s.a),
                                               static_cast<double>(s.b), s.sign),
                             point);
            },
            [point](const SplitElem<double>& s) -> double { return apply(s, point); },
            [point](const StickyElem<std::int64_t>& s) -> double {
                return apply(StickyElem<double>(static_cast<double>(s.a),
                                                static_cast<double>(s.b),
                                                static_cast<double>(s.c)),
                             point);
            },
            [point](const StickyElem<double>& s) -> double { return apply(s, point); }},
        e);
}

SemigroupElement radial_homomorphism(const SemigroupElement& e) {
    return std::visit(
        overloaded{
            [](const SplitElem<std::int64_t>& s) -> SemigroupElement {
                return radial_homomorphism(s);
            },
            [](const SplitElem<double>& s) -> SemigroupElement {
                return radial_homomorphism(s);
            },
            [](const StickyElem<std::int64_t>& s) -> SemigroupElement {
                return radial_homomorphism(s);
            },
            [](const StickyElem<double>& s) -> SemigroupElement {
                return radial_homomorphism(s);
            },
            [](const auto&) -> SemigroupElement {
                throw std::invalid_argument(
                    "radial_homomorphism: defined for splitting and stickiness only");
            }},
        e);
}

bool operator==(const SemigroupElement& x, const SemigroupElement& y) {
    if (x.index() != y.index()) return false;
    return std::visit(
        [&y](const auto& xv) {
            using T = std::decay_t<decltype(xv)>;
            return xv == std::get<T>(y);
        },
        x);
}

}  // namespace flownoise
