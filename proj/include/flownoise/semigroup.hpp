#pragma once

// The concrete semigroups: the cyclic group Z_m, the coalescence maps
// f_{a,b}(x) = a + max(x,b) on [0,inf), the splitting maps f^{+-}_{a,b} on R,
// and the stickiness maps f_{a,b,c} on [0,inf).
//
// COMPOSITION ORDER: compose(x, y) applies x FIRST and y SECOND, i.e. the
// composed map is p -> apply(y, apply(x, p)). Every law in this file and
// every flow product in the library follows this "left acts first"
// convention. Getting this backwards is the classic mistake with these
// semigroups; the tests pin it down via pointwise soundness checks.
//
// Scalar parameters are generic over exact 64-bit integers and doubles.
// Lattice models use the integer instantiations so that all algebraic
// identities hold exactly.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace flownoise {

template <class T>
concept Scalar = std::same_as<T, std::int64_t> || std::same_as<T, double>;

// ---------------------------------------------------------------------------
// Element types

// Element of the cyclic group Z_m (modulus is carried per element).
struct ZmElem {
    std::int64_t m = 2;
    std::int64_t value = 0;

    ZmElem() = default;
    ZmElem(std::int64_t modulus, std::int64_t v) : m(modulus), value(v) {
        if (m < 2) throw std::invalid_argument("ZmElem: modulus must be >= 2");
        value %= m;
        if (value < 0) value += m;
    }
};

// x -> a + max(x, b) on [0, inf); requires b >= 0 and a + b >= 0.
template <Scalar T>
struct CoalElem {
    T a{};
    T b{};

    CoalElem() = default;
    CoalElem(T a_, T b_) : a(a_), b(b_) {
        if (b < T{0} || a + b < T{0})
            throw std::invalid_argument("CoalElem: requires b >= 0 and a + b >= 0");
    }
};

enum class Sign : int { minus = -1, plus = +1 };

// The splitting maps on R. sign selects whether the pinch zone [-b, b]
// is sent to -(a+b) or +(a+b); outside it the map is x -> x + a (x > b)
// and x -> x - a (x < -b). When a + b == 0 the two signs describe the same
// map (the pinch image is 0), so the representation is normalized to plus;
// equality of elements then coincides with equality of maps.
template <Scalar T>
struct SplitElem {
    T a{};
    T b{};
    Sign sign = Sign::plus;

    SplitElem() = default;
    SplitElem(T a_, T b_, Sign s) : a(a_), b(b_), sign(s) {
        if (b < T{0} || a + b < T{0})
            throw std::invalid_argument("SplitElem: requires b >= 0 and a + b >= 0");
        if (a + b == T{0}) sign = Sign::plus;
    }
};

// The stickiness maps: x -> c on [0, b], x -> x + a on (b, inf);
// requires b >= 0 and 0 <= c <= a + b.
template <Scalar T>
struct StickyElem {
    T a{};
    T b{};
    T c{};

    StickyElem() = default;
    StickyElem(T a_, T b_, T c_) : a(a_), b(b_), c(c_) {
        if (b < T{0} || c < T{0} || c > a + b)
            throw std::invalid_argument("StickyElem: requires b >= 0 and 0 <= c <= a + b");
    }
};

// ---------------------------------------------------------------------------
// Composition laws (x first, then y)

inline ZmElem compose(const ZmElem& x, const ZmElem& y) {
    if (x.m != y.m) throw std::invalid_argument("compose: mismatched Z_m moduli");
    return ZmElem(x.m, x.value + y.value);
}

template <Scalar T>
CoalElem<T> compose(const CoalElem<T>& x, const CoalElem<T>& y) {
    return CoalElem<T>(x.a + y.a, std::max(x.b, y.b - x.a));
}

// The composed sign belongs to whichever leg realizes the overall minimum
// level -b. Ties go to the SECOND leg: the pinch zone [-b,b] of the second
// map is closed, so a point parked exactly at level -b2 by the first map is
// re-pinched by the second. This tie rule is what makes the composition law
// agree pointwise with map composition, and it is associative.
template <Scalar T>
SplitElem<T> compose(const SplitElem<T>& x, const SplitElem<T>& y) {
    const T b = std::max(x.b, y.b - x.a);
    const Sign s = (x.b > y.b - x.a) ? x.sign : y.sign;
    return SplitElem<T>(x.a + y.a, b, s);
}

template <Scalar T>
StickyElem<T> compose(const StickyElem<T>& x, const StickyElem<T>& y) {
    const T c = (x.c > y.b) ? y.a + x.c : y.c;
    return StickyElem<T>(x.a + y.a, std::max(x.b, y.b - x.a), c);
}

// ---------------------------------------------------------------------------
// Point actions

inline std::int64_t apply(const ZmElem& e, std::int64_t point) {
    if (point < 0 || point >= e.m)
        throw std::invalid_argument("apply: point outside Z_m");
    return (point + e.value) % e.m;
}

template <Scalar T>
T apply(const CoalElem<T>& e, T point) {
    if (point < T{0}) throw std::invalid_argument("apply: coalescence point must be >= 0");
    return e.a + std::max(point, e.b);
}

template <Scalar T>
T apply(const SplitElem<T>& e, T point) {
    if (point > e.b) return point + e.a;
    if (point < -e.b) return point - e.a;
    return static_cast<T>(static_cast<int>(e.sign)) * (e.a + e.b);
}

template <Scalar T>
T apply(const StickyElem<T>& e, T point) {
    if (point < T{0}) throw std::invalid_argument("apply: stickiness point must be >= 0");
    return point <= e.b ? e.c : point + e.a;
}

// ---------------------------------------------------------------------------
// Radial homomorphisms onto the coalescence semigroup

template <Scalar T>
CoalElem<T> radial_homomorphism(const SplitElem<T>& e) {
    return CoalElem<T>(e.a, e.b);
}

template <Scalar T>
CoalElem<T> radial_homomorphism(const StickyElem<T>& e) {
    return CoalElem<T>(e.a, e.b);
}

// ---------------------------------------------------------------------------
// Equality

inline bool operator==(const ZmElem& x, const ZmElem& y) {
    return x.m == y.m && x.value == y.value;
}
template <Scalar T>
bool operator==(const CoalElem<T>& x, const CoalElem<T>& y) {
    return x.a == y.a && x.b == y.b;
}
template <Scalar T>
bool operator==(const SplitElem<T>& x, const SplitElem<T>& y) {
    return x.a == y.a && x.b == y.b && x.sign == y.sign;
}
template <Scalar T>
bool operator==(const StickyElem<T>& x, const StickyElem<T>& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c;
}

// ---------------------------------------------------------------------------
// Tagged element over all supported semigroups

using SemigroupElement =
    std::variant<ZmElem, CoalElem<std::int64_t>, CoalElem<double>,
                 SplitElem<std::int64_t>, SplitElem<double>,
                 StickyElem<std::int64_t>, StickyElem<double>>;

enum class SemigroupKind { zm, coalescence, splitting, stickiness };

std::string kind_name(SemigroupKind kind);

// Neutral element. Z_m needs the modulus; the map semigroups default to
// integer scalars (the identity composes only with elements of the same
// scalar type, see identity_like for the generic case).
SemigroupElement identity(SemigroupKind kind, std::int64_t m = 0);

// Neutral element of the same variant alternative as `e`.
SemigroupElement identity_like(const SemigroupElement& e);

SemigroupKind kind_of(const SemigroupElement& e);

SemigroupElement compose(const SemigroupElement& x, const SemigroupElement& y);

// Point action with the element's parameters promoted to double. Exact for
// integer elements and integer-valued points up to 2^53.
double apply(const SemigroupElement& e, double point);

// (a, b) projection for splitting/stickiness elements; error otherwise.
SemigroupElement radial_homomorphism(const SemigroupElement& e);

bool operator==(const SemigroupElement& x, const SemigroupElement& y);

}  // namespace flownoise
