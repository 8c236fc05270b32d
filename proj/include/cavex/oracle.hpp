#pragma once

// Arc length as the integral of sqrt(1 + f'^2), by adaptive Simpson.

#include <cmath>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "rectify.hpp"

namespace cavex {

inline constexpr int max_quadrature_depth = 48;

struct QuadratureResult {
    double value = 0;
    double error_estimate = 0;
    long evaluations = 0;
};

namespace detail {

class Simpson {
public:
    explicit Simpson(const Curve& c) : c_(c) {}

    double integrand(double x) {
        ++evals_;
        return std::hypot(1.0, c_.df(x));
    }

    // Simpson's rule on the nodes actually used: a < c < b with c the rounded
    // midpoint. Near x = 1 rounding moves c by a visible fraction of a
    // short panel, so the weights follow c. Exact for constant integrands.
    static double rule(double a, double c, double b, double fa, double fc, double fb) {
        const double h = b - a;
        const double t = (c - a) / h;
        const double wa = (3 * t - 1) / (6 * t);
        const double wb = (2 - 3 * t) / (6 * (1 - t));
        return h * (fc + wa * (fa - fc) + wb * (fb - fc));
    }

    static double midpoint(double a, double b, int depth) {
        const double m = a + (b - a) / 2;
        if (!(m > a && m < b)) {
            throw MaxDepthExceeded("adaptive Simpson ran out of resolution at depth " + std::to_string(depth) +
                                   " near x=" + format_number(a));
        }
        return m;
    }

    void step(double a, double m, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
        const double lm = midpoint(a, m, depth), rm = midpoint(m, b, depth);
        const double flm = integrand(lm), frm = integrand(rm);
        const double left = rule(a, lm, m, fa, flm, fm);
        const double right = rule(m, rm, b, fm, frm, fb);
        const double diff = left + right - whole;
        if (std::abs(diff) <= 15 * tol) {
            value_ += left + right + diff / 15;
            err_ += std::abs(diff) / 15;
            return;
        }
        if (depth >= max_quadrature_depth) {
            throw MaxDepthExceeded("adaptive Simpson reached depth " + std::to_string(depth) + " near x=" +
                                   format_number(m));
        }
        step(a, lm, m, fa, flm, fm, left, tol / 2, depth + 1);
        step(m, rm, b, fm, frm, fb, right, tol / 2, depth + 1);
    }

    QuadratureResult run(double a, double b, double tol) {
        const double m = midpoint(a, b, 0);
        const double fa = integrand(a), fb = integrand(b), fm = integrand(m);
        step(a, m, b, fa, fm, fb, rule(a, m, b, fa, fm, fb), tol, 0);
        return {value_, err_, evals_};
    }

private:
    const Curve& c_;
    double value_ = 0, err_ = 0;
    long evals_ = 0;
};

} // namespace detail

inline QuadratureResult arclength_integral(const Curve& c, double x1, double x2, double tol) {
    if (!(tol > 0)) throw DomainError("quadrature needs tol > 0");
    if (!(x1 < x2) || x1 < c.a() || x2 > c.b()) throw DomainError("quadrature interval must lie in the domain");
    return detail::Simpson(c).run(x1, x2, tol);
}

inline QuadratureResult arclength_integral(const Curve& c, double tol = 1e-10) {
    return arclength_integral(c, c.a(), c.b(), tol);
}

struct SecantLimitRow {
    int stage;
    double secant;
    double gap; ///< tangent minus secant at this stage
    double diff; ///< |secant - integral|
};

struct SecantLimitReport {
    QuadratureResult integral;
    std::vector<SecantLimitRow> rows;
    bool monotone = true;     ///< diff column non-increasing up to quadrature noise
    bool final_within = true; ///< final diff < 10 * gap / 2
};

/// Secant measures of dyadic partitions against the quadrature value.
inline SecantLimitReport integral_vs_secant_limit(const Curve& c, int stages, double tol = 1e-12) {
    if (segment_cavex(c).size() != 1) throw NotCavex("integral_vs_secant_limit needs a single cavex segment");
    SecantLimitReport r;
    r.integral = arclength_integral(c, tol);
    const double noise = 16 * ulp(r.integral.value) + r.integral.error_estimate;
    Partition p = Partition::trivial(c.a(), c.b());
    for (int stage = 0; stage <= stages; ++stage) {
        const MeasurePair m = measure_pair(c, p);
        const double diff = std::abs(m.S - r.integral.value);
        if (!r.rows.empty() && diff > r.rows.back().diff + noise) r.monotone = false;
        r.rows.push_back({stage, m.S, m.gap, diff});
        if (stage < stages) p = p.bisect_all();
    }
    const auto& last = r.rows.back();
    r.final_within = last.diff < 10 * last.gap / 2 + noise;
    return r;
}

} // namespace cavex
