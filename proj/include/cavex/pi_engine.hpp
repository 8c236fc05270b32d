#pragma once

// Nested enclosures of pi from inscribed and circumscribed regular polygons
// whose side count doubles at every stage.
//
// All quantities are normalized by the diameter: l = L/(2r) is the
// inscribed half-side over the radius and u = U/(2r) the circumscribed one,
// so l = sin(pi/m) and u = tan(pi/m) for an m-gon and the radius never
// enters the recurrence. m*l and m*u are the perimeter ratios P/(2r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "bigfloat.hpp"
#include "interval.hpp"
#include "scalar.hpp"

namespace cavex {

/// How the inscribed side is halved.
enum class Recurrence {
    /// l' = sqrt(l^2 / (2 (1 + sqrt(1 - l^2))))
    stable,
    /// l' = sqrt((1 - sqrt(1 - l^2)) / 2); loses all digits once l^2 nears the unit roundoff
    naive,
};

/// Stage cap keeps the side count 6 * 2^n inside a signed 64-bit integer.
inline constexpr int max_pi_stage = 60;

template <class T>
struct DoublingState {
    int k = 6;
    int stage = 0;
    std::int64_t sides = 6;
    Interval<T> l; ///< L_n / (2r)
    Interval<T> u; ///< U_n / (2r)
};

template <class T>
struct PiEnclosure {
    int stage = 0;
    std::int64_t sides = 0;
    T lower{};
    T upper{};
    T width{};

    Interval<T> interval() const { return {lower, upper}; }
};

namespace detail {

template <class T>
T one_like(int bits) {
    return ScalarTraits<T>::from_int(1, ScalarTraits<T>::zero(bits));
}

template <class T>
int bits_of(const T& x) {
    return ScalarTraits<T>::precision_bits(x);
}

// sqrt(1 - x^2) for x >= 0, rounded toward `dir`.
template <class T>
T cosine_from_sine(const T& x, Rounding dir) {
    using Tr = ScalarTraits<T>;
    const T one = Tr::from_int(1, x);
    const T sq = Tr::mul(x, x, opposite(dir));
    const T rest = Tr::sub(one, sq, dir);
    if (Tr::compare(rest, Tr::zero(bits_of(x))) <= 0) {
        throw PrecisionExhausted("1 - l^2 is not positive at working precision", -1);
    }
    return Tr::sqrt(rest, dir);
}

// u = l / sqrt(1 - l^2); increasing in l.
template <class T>
Interval<T> circumscribed_from_inscribed(const Interval<T>& l) {
    using Tr = ScalarTraits<T>;
    T lo = Tr::div(l.lo(), cosine_from_sine(l.lo(), Rounding::up), Rounding::down);
    T hi = Tr::div(l.hi(), cosine_from_sine(l.hi(), Rounding::down), Rounding::up);
    return {std::move(lo), std::move(hi)};
}

// Halved side for one endpoint; the map is increasing in l so each endpoint
// is pushed toward `dir`.
template <class T>
T halve_side(const T& l, Rounding dir, Recurrence rec) {
    using Tr = ScalarTraits<T>;
    const T one = Tr::from_int(1, l);
    const T two = Tr::from_int(2, l);
    const Rounding against = opposite(dir);
    if (rec == Recurrence::stable) {
        const T num = Tr::mul(l, l, dir);
        const T cosine = cosine_from_sine(l, against);
        const T den = Tr::mul(two, Tr::add(one, cosine, against), against);
        return Tr::sqrt(Tr::div(num, den, dir), dir);
    }
    const T cosine = cosine_from_sine(l, against);
    const T diff = Tr::sub(one, cosine, dir);
    if (Tr::compare(diff, Tr::zero(bits_of(l))) <= 0) return Tr::zero(bits_of(l));
    return Tr::sqrt(Tr::div(diff, two, dir), dir);
}

} // namespace detail

/// Stage-0 state for an inscribed regular k-gon, k in {3, 4, 6}.
/// `bits` selects the working precision and is ignored for binary64.
template <class T>
DoublingState<T> init_state(int k, int bits = 128) {
    using Tr = ScalarTraits<T>;
    const T one = detail::one_like<T>(bits);
    DoublingState<T> s;
    s.k = k;
    s.stage = 0;
    s.sides = k;
    switch (k) {
    case 6: {
        const T half = Tr::div(one, Tr::from_int(2, one), Rounding::down); // exact
        s.l = Interval<T>(half);
        break;
    }
    case 4:
    case 3: {
        // (L0/2r)^2 = 1/2 for the square, 3/4 for the triangle
        const T sq = k == 4 ? Tr::div(one, Tr::from_int(2, one), Rounding::down)
                            : Tr::div(Tr::from_int(3, one), Tr::from_int(4, one), Rounding::down);
        s.l = Interval<T>(Tr::sqrt(sq, Rounding::down), Tr::sqrt(sq, Rounding::up));
        break;
    }
    default:
        throw UnsupportedK(k);
    }
    s.u = detail::circumscribed_from_inscribed(s.l);
    return s;
}

/// Doubles the side count. Throws PrecisionExhausted once the inscribed
/// enclosure is wider than its own lower end.
template <class T>
DoublingState<T> step(const DoublingState<T>& s, Recurrence rec = Recurrence::stable) {
    using Tr = ScalarTraits<T>;
    const T zero = Tr::zero(detail::bits_of(s.l.lo()));
    if (Tr::compare(s.l.lo(), zero) <= 0) throw DomainError("doubling state requires l > 0");
    if (Tr::compare(s.l.lo(), s.u.hi()) > 0) throw DomainError("doubling state requires l < u");
    if (s.stage >= max_pi_stage) {
        throw PrecisionExhausted("stage limit " + std::to_string(max_pi_stage) + " reached", s.stage);
    }

    DoublingState<T> next;
    next.k = s.k;
    next.stage = s.stage + 1;
    next.sides = s.sides * 2;
    T lo = detail::halve_side(s.l.lo(), Rounding::down, rec);
    T hi = detail::halve_side(s.l.hi(), Rounding::up, rec);
    next.l = Interval<T>(std::move(lo), std::move(hi));
    if (Tr::compare(next.l.width(), next.l.lo()) > 0) {
        throw PrecisionExhausted("inscribed enclosure wider than its lower end at stage " + std::to_string(next.stage),
                                 s.stage);
    }
    try {
        next.u = detail::circumscribed_from_inscribed(next.l);
    } catch (const PrecisionExhausted& e) {
        throw PrecisionExhausted(e.what(), s.stage);
    }
    return next;
}

template <class T>
PiEnclosure<T> enclosure(const DoublingState<T>& s) {
    using Tr = ScalarTraits<T>;
    const T m = Tr::from_int(s.sides, s.l.lo());
    PiEnclosure<T> e;
    e.stage = s.stage;
    e.sides = s.sides;
    e.lower = Tr::mul(m, s.l.lo(), Rounding::down);
    e.upper = Tr::mul(m, s.u.hi(), Rounding::up);
    e.width = Tr::sub(e.upper, e.lower, Rounding::up);
    return e;
}

/// Stop after a fixed number of stages or once the enclosure width is at most a tolerance.
struct StopRule {
    std::optional<int> max_stages;
    std::optional<double> width_tol;

    static StopRule stages(int n) { return {n, std::nullopt}; }
    static StopRule width(double tol) { return {std::nullopt, tol}; }
};

template <class T>
struct PiRun {
    std::vector<PiEnclosure<T>> trace;
    std::vector<DoublingState<T>> states;
    bool exhausted = false;
    std::string reason;

    const PiEnclosure<T>& final() const { return trace.back(); }
};

/// Runs the doubling until the stop rule is met. Precision exhaustion ends
/// the run early with `exhausted` set and the trace up to the last valid
/// stage. With the stable recurrence each enclosure must nest inside the
/// previous one; a stage that fails to tighten counts as exhaustion.
template <class T>
PiRun<T> run(int k, const StopRule& stop, int bits = 128, Recurrence rec = Recurrence::stable) {
    using Tr = ScalarTraits<T>;
    if (stop.max_stages && *stop.max_stages < 0) throw DomainError("max_stages must be >= 0");
    if (stop.width_tol && !(*stop.width_tol > 0)) throw DomainError("width tolerance must be > 0");
    if (!stop.max_stages && !stop.width_tol) throw DomainError("no stop criterion");

    PiRun<T> out;
    DoublingState<T> s = init_state<T>(k, bits);
    out.states.push_back(s);
    out.trace.push_back(enclosure(s));

    auto done = [&](const PiEnclosure<T>& e) {
        if (stop.max_stages && e.stage >= *stop.max_stages) return true;
        if (stop.width_tol) {
            const T tol = Tr::from_double(*stop.width_tol, detail::bits_of(e.width), Rounding::down);
            if (Tr::compare(e.width, tol) <= 0) return true;
        }
        return false;
    };

    while (!done(out.trace.back())) {
        try {
            s = step(s, rec);
        } catch (const PrecisionExhausted& e) {
            out.exhausted = true;
            out.reason = e.what();
            return out;
        }
        PiEnclosure<T> e = enclosure(s);
        if (rec == Recurrence::stable) {
            const auto& prev = out.trace.back();
            if (Tr::compare(e.lower, prev.lower) <= 0 || Tr::compare(e.upper, prev.upper) >= 0) {
                out.exhausted = true;
                out.reason = "enclosure stopped tightening at stage " + std::to_string(e.stage);
                return out;
            }
        }
        out.states.push_back(s);
        out.trace.push_back(std::move(e));
    }
    return out;
}

/// Reference enclosure of pi from a deep run of this engine at four times
/// the working precision.
inline Interval<BigFloat> reference_pi(int engine_bits = 128, int stages = 55) {
    const int bits = std::max(4 * engine_bits, 4 * std::numeric_limits<double>::digits);
    const auto r = run<BigFloat>(6, StopRule::stages(stages), bits);
    return r.final().interval();
}

/// Normalized apothem defects of stage n, computed two ways: from the next
/// stage (b/r = 2 l'^2, a/r = u u') and from the right triangles directly
/// (b/r = 1 - sqrt(1 - l^2), a/r = sqrt(1 + u^2) - 1).
template <class T>
struct DerivedQuantities {
    Interval<T> b_over_r;
    Interval<T> a_over_r;
    Interval<T> b_over_r_pythagoras;
    Interval<T> a_over_r_pythagoras;
    /// (a + b)^2 / r^2 against u^2 - l^2
    Interval<T> ab_sum_squared;
    Interval<T> half_side_gap;
    /// b^2 / r^2 against 4 l'^2 - l^2
    Interval<T> b_squared;
    Interval<T> b_squared_from_sides;
    /// a^2 / r^2 against u (u - 2 u')
    Interval<T> a_squared;
    Interval<T> a_squared_from_sides;
};

template <class T>
DerivedQuantities<T> derived_quantities(const DoublingState<T>& s, const DoublingState<T>& next) {
    using Tr = ScalarTraits<T>;
    const Interval<T> one(Tr::from_int(1, s.l.lo()));
    const Interval<T> two(Tr::from_int(2, s.l.lo()));
    const Interval<T> four(Tr::from_int(4, s.l.lo()));
    DerivedQuantities<T> d;
    d.b_over_r = two * next.l.squared();
    d.a_over_r = s.u * next.u;
    d.b_over_r_pythagoras = one - sqrt(one - s.l.squared());
    d.a_over_r_pythagoras = sqrt(one + s.u.squared()) - one;
    const Interval<T> ab = d.a_over_r + d.b_over_r;
    d.ab_sum_squared = ab * ab;
    d.half_side_gap = s.u.squared() - s.l.squared();
    d.b_squared = d.b_over_r * d.b_over_r;
    d.b_squared_from_sides = four * next.l.squared() - s.l.squared();
    d.a_squared = d.a_over_r * d.a_over_r;
    d.a_squared_from_sides = s.u * (s.u - two * next.u);
    return d;
}

/// Comparison of the actual normalized area defects with two readings of the
/// textbook defect bound (a + b) L / 2: per sector and multiplied by the
/// sector count.
struct GapBoundReport {
    int stage = 0;
    std::int64_t sides = 0;
    double delta_lower = 0;   ///< pi - m l
    double delta_upper = 0;   ///< m u - pi
    double literal_bound = 0; ///< (u u' + 2 l'^2) l
    double count_corrected_bound = 0;
    bool literal_holds = false;
    bool count_corrected_holds = false;
    double count_corrected_margin = 0; ///< bound / max(delta)
};

template <class T>
GapBoundReport gap_bound_check(const DoublingState<T>& s, const Interval<BigFloat>& pi_ref) {
    using Tr = ScalarTraits<T>;
    const DoublingState<T> next = step(s);
    const auto to_big = [&](const T& x, Rounding dir) {
        return BigFloat::from_double(Tr::to_double(x), pi_ref.lo().bits(), dir);
    };
    const auto big_iv = [&](const Interval<T>& iv) -> Interval<BigFloat> {
        if constexpr (std::is_same_v<T, BigFloat>) {
            return {iv.lo().with_bits(pi_ref.lo().bits(), Rounding::down),
                    iv.hi().with_bits(pi_ref.lo().bits(), Rounding::up)};
        } else {
            return {to_big(iv.lo(), Rounding::down), to_big(iv.hi(), Rounding::up)};
        }
    };
    const Interval<BigFloat> l = big_iv(s.l);
    const Interval<BigFloat> u = big_iv(s.u);
    const Interval<BigFloat> l1 = big_iv(next.l);
    const Interval<BigFloat> u1 = big_iv(next.u);
    const Interval<BigFloat> m(BigFloat::from_int(s.sides, pi_ref.lo().bits()));
    const Interval<BigFloat> two(BigFloat::from_int(2, pi_ref.lo().bits()));

    const Interval<BigFloat> delta_l = pi_ref - m * l;
    const Interval<BigFloat> delta_u = m * u - pi_ref;
    const Interval<BigFloat> literal = (u * u1 + two * l1.squared()) * l;
    const Interval<BigFloat> corrected = m * literal;

    GapBoundReport r;
    r.stage = s.stage;
    r.sides = s.sides;
    r.delta_lower = delta_l.mid().to_double();
    r.delta_upper = delta_u.mid().to_double();
    r.literal_bound = literal.mid().to_double();
    r.count_corrected_bound = corrected.mid().to_double();
    const auto holds = [&](const Interval<BigFloat>& bound) {
        return BigFloat::compare(delta_l.hi(), bound.lo()) <= 0 && BigFloat::compare(delta_u.hi(), bound.lo()) <= 0;
    };
    r.literal_holds = holds(literal);
    r.count_corrected_holds = holds(corrected);
    r.count_corrected_margin = r.count_corrected_bound / std::max(r.delta_lower, r.delta_upper);
    return r;
}

namespace detail {

template <class T>
T radius_value(double r, int bits, Rounding dir) {
    if (!(r > 0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    return ScalarTraits<T>::from_double(r, bits, dir);
}

} // namespace detail

/// Area of the circle of radius r: [lower r^2, upper r^2].
template <class T>
Interval<T> area_enclosure(double r, const PiEnclosure<T>& e) {
    using Tr = ScalarTraits<T>;
    const int bits = detail::bits_of(e.lower);
    const T r_lo = detail::radius_value<T>(r, bits, Rounding::down);
    const T r_hi = detail::radius_value<T>(r, bits, Rounding::up);
    return {Tr::mul(e.lower, Tr::mul(r_lo, r_lo, Rounding::down), Rounding::down),
            Tr::mul(e.upper, Tr::mul(r_hi, r_hi, Rounding::up), Rounding::up)};
}

/// Circumference of the circle of radius r: [2 r lower, 2 r upper].
template <class T>
Interval<T> circumference_enclosure(double r, const PiEnclosure<T>& e) {
    using Tr = ScalarTraits<T>;
    const int bits = detail::bits_of(e.lower);
    const T two = Tr::from_int(2, e.lower);
    const T d_lo = Tr::mul(two, detail::radius_value<T>(r, bits, Rounding::down), Rounding::down);
    const T d_hi = Tr::mul(two, detail::radius_value<T>(r, bits, Rounding::up), Rounding::up);
    return {Tr::mul(e.lower, d_lo, Rounding::down), Tr::mul(e.upper, d_hi, Rounding::up)};
}

} // namespace cavex
