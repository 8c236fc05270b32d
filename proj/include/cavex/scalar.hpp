#pragma once

// Directed rounding for native binary64.
//
// Each operation is computed once in round-to-nearest, the exact rounding
// error is recovered with an error-free transformation (TwoSum or an FMA
// residual), and the result is nudged one representable step outward only
// when the error points the wrong way for the requested direction. Exact
// results therefore pass through untouched and inexact ones land on the
// nearest representable value on the requested side.

#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace cavex {

enum class Rounding { down, up };

constexpr Rounding opposite(Rounding r) noexcept {
    return r == Rounding::down ? Rounding::up : Rounding::down;
}

enum class Op { add, sub, mul, div, sqrt };

inline double next_up(double x) noexcept { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
inline double next_down(double x) noexcept { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

/// Distance from |x| to the next representable value away from zero.
inline double ulp(double x) noexcept {
    const double a = std::fabs(x);
    return next_up(a) - a;
}

namespace detail {

inline void require_finite(double x, const char* op) {
    if (!std::isfinite(x)) throw DomainError(std::string("non-finite operand to ") + op);
}

inline double check_result(double r, const char* op) {
    if (!std::isfinite(r)) throw OverflowError(std::string("overflow in ") + op);
    return r;
}

// Below this magnitude FMA residuals may themselves underflow, so the sign of
// the residual is no longer trustworthy and we always nudge.
constexpr double residual_floor = std::numeric_limits<double>::min() * 0x1p54;

// `err_sign` is the sign of (exact - rounded).
inline double settle(double rounded, int err_sign, Rounding dir) noexcept {
    if (dir == Rounding::up && err_sign > 0) return next_up(rounded);
    if (dir == Rounding::down && err_sign < 0) return next_down(rounded);
    return rounded;
}

inline int sign_of(double e) noexcept { return (e > 0) - (e < 0); }

} // namespace detail

/// a + b == hi + lo exactly (round to nearest).
struct SumPair {
    double hi, lo;
};

inline SumPair two_sum(double a, double b) noexcept {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline double add(double a, double b, Rounding dir) {
    detail::require_finite(a, "add");
    detail::require_finite(b, "add");
    const auto [s, err] = two_sum(a, b);
    detail::check_result(s, "add");
    return detail::settle(s, detail::sign_of(err), dir);
}

inline double sub(double a, double b, Rounding dir) { return add(a, -b, dir); }

inline double mul(double a, double b, Rounding dir) {
    detail::require_finite(a, "mul");
    detail::require_finite(b, "mul");
    const double p = detail::check_result(a * b, "mul");
    if (p != 0 && std::fabs(p) < detail::residual_floor) return dir == Rounding::up ? next_up(p) : next_down(p);
    if (p == 0) {
        if (a == 0 || b == 0) return p;
        // underflowed to zero: the exact product has the sign of a*b
        return detail::settle(p, (a > 0) == (b > 0) ? 1 : -1, dir);
    }
    return detail::settle(p, detail::sign_of(std::fma(a, b, -p)), dir);
}

inline double div(double a, double b, Rounding dir) {
    detail::require_finite(a, "div");
    detail::require_finite(b, "div");
    if (b == 0) throw DomainError("division by zero");
    const double q = detail::check_result(a / b, "div");
    if (a == 0) return q;
    if (std::fabs(q) < detail::residual_floor || std::fabs(a) < detail::residual_floor) {
        return dir == Rounding::up ? next_up(q) : next_down(q);
    }
    const double r = std::fma(-q, b, a); // a - q*b, exact
    return detail::settle(q, detail::sign_of(r) * (b > 0 ? 1 : -1), dir);
}

inline double sqrt(double x, Rounding dir) {
    detail::require_finite(x, "sqrt");
    if (x < 0) throw DomainError("sqrt of negative value");
    const double r = std::sqrt(x);
    if (x == 0) return r;
    if (x < detail::residual_floor) return dir == Rounding::up ? next_up(r) : next_down(r);
    return detail::settle(r, detail::sign_of(std::fma(-r, r, x)), dir);
}

/// Generic entry point: `b` is ignored for Op::sqrt.
inline double round_dir(Op op, double a, double b, Rounding dir) {
    switch (op) {
    case Op::add: return add(a, b, dir);
    case Op::sub: return sub(a, b, dir);
    case Op::mul: return mul(a, b, dir);
    case Op::div: return div(a, b, dir);
    case Op::sqrt: return sqrt(a, dir);
    }
    throw DomainError("unknown operation");
}

/// Arithmetic policy consumed by Interval and the polygon-doubling engine.
/// A specialization provides construction, the five directed operations and
/// an exact three-way comparison.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static double zero(int /*bits*/) { return 0.0; }
    static double from_int(long long v, const double& /*like*/) { return static_cast<double>(v); }
    /// Directed conversion; exact whenever the value is representable.
    static double from_double(double v, int /*bits*/, Rounding /*dir*/) { return v; }
    static double add(const double& a, const double& b, Rounding d) { return cavex::add(a, b, d); }
    static double sub(const double& a, const double& b, Rounding d) { return cavex::sub(a, b, d); }
    static double mul(const double& a, const double& b, Rounding d) { return cavex::mul(a, b, d); }
    static double div(const double& a, const double& b, Rounding d) { return cavex::div(a, b, d); }
    static double sqrt(const double& a, Rounding d) { return cavex::sqrt(a, d); }
    static double to_double(const double& a) { return a; }
    static int precision_bits(const double&) { return std::numeric_limits<double>::digits; }
    static bool is_zero(const double& a) { return a == 0; }
    static int compare(const double& a, const double& b) { return (a > b) - (a < b); }
};

} // namespace cavex
