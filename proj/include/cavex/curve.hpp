#pragma once

// Graph curves y = f(x) on [a,b] with derivatives, tangent-line
// intersections and segmentation into convex/concave pieces.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"

namespace cavex {

/// Samples taken when a curve is constructed.
inline constexpr int domain_samples = 1024;
/// Distance the registry quarter circle stops short of x = 1.
inline constexpr double quarter_circle_edge = 1e-9;

class Curve {
public:
    using Map = std::function<Dual(double)>;

    /// Throws DomainError unless a < b and f, f' are finite on 1024 samples of [a,b].
    Curve(std::string name, Map f, double a, double b) : name_(std::move(name)), f_(std::move(f)), a_(a), b_(b) {
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
            throw DomainError("curve domain must satisfy a < b, got [" + detail::format_number(a) + ", " +
                              detail::format_number(b) + "]");
        }
        for (int i = 0; i < domain_samples; ++i) {
            const double x = i + 1 == domain_samples ? b : a + (b - a) * i / (domain_samples - 1);
            try {
                const Dual d = f_(x);
                if (!std::isfinite(d.value) || !std::isfinite(d.deriv)) throw DomainError("non-finite value");
            } catch (const DomainError& e) {
                throw DomainError("curve '" + name_ + "' is not differentiable on [" + detail::format_number(a) + ", " +
                                  detail::format_number(b) + "] at x=" + detail::format_number(x) + ": " + e.what());
            }
        }
    }

    static Curve from_expr(const Expr& e, double a, double b) {
        return Curve(e.to_string(), [e](double x) { return e.eval_dual(x); }, a, b);
    }
    static Curve from_expr(std::string_view src, double a, double b) { return from_expr(Expr::parse(src), a, b); }

    Dual eval(double x) const { return f_(x); }
    double f(double x) const { return f_(x).value; }
    double df(double x) const { return f_(x).deriv; }

    double a() const { return a_; }
    double b() const { return b_; }
    const std::string& name() const { return name_; }

    /// Same map on a sub-interval.
    Curve restricted(double lo, double hi) const {
        if (lo < a_ || hi > b_) throw DomainError("restriction leaves the curve domain");
        return Curve(name_, f_, lo, hi);
    }

private:
    std::string name_;
    Map f_;
    double a_, b_;
};

// ---- registry -----------------------------------------------------------

struct RegistryEntry {
    std::string_view name;
    std::string_view source; ///< expression; line uses m*x + c
    double a, b;
};

inline const std::vector<RegistryEntry>& registry() {
    static const std::vector<RegistryEntry> entries = {
        {"line", "1*x + 0", 0.0, 1.0},
        {"parabola", "x^2", 0.0, 1.0},
        {"quarter_circle", "sqrt((1 - x) * (1 + x))", 0.0, 1.0 - quarter_circle_edge},
        {"exp", "exp(x)", 0.0, 1.0},
        {"log", "log(x)", 1.0, 2.0},
        {"sin", "sin(x)", 0.0, std::numbers::pi},
    };
    return entries;
}

inline std::vector<std::string> registry_names() {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
}

inline Expr line_expr(double m, double c) {
    return Expr::parse(detail::format_number(m) + " * x + " + detail::format_number(c));
}

/// Looks up "name" or "line(m,c)". Returns nullopt for unknown names.
inline std::optional<std::pair<Expr, RegistryEntry>> lookup_registry(std::string_view spec) {
    std::string_view name = spec;
    std::optional<std::pair<double, double>> line_args;
    if (const auto open = spec.find('('); open != std::string_view::npos) {
        name = spec.substr(0, open);
        if (name != "line" || spec.back() != ')') return std::nullopt;
        const std::string args(spec.substr(open + 1, spec.size() - open - 2));
        const auto comma = args.find(',');
        if (comma == std::string::npos) return std::nullopt;
        try {
            const double m = std::stod(args.substr(0, comma));
            const double c = std::stod(args.substr(comma + 1));
            line_args = {m, c};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    for (const auto& e : registry()) {
        if (e.name != name) continue;
        if (line_args) return std::pair{line_expr(line_args->first, line_args->second), e};
        return std::pair{Expr::parse(e.source), e};
    }
    return std::nullopt;
}

/// Registry curve on its default domain, or on [a,b] when given.
inline Curve registry_curve(std::string_view spec, std::optional<double> a = {}, std::optional<double> b = {}) {
    auto hit = lookup_registry(spec);
    if (!hit) throw DomainError("unknown curve '" + std::string(spec) + "'");
    return Curve(std::string(spec), [e = hit->first](double x) { return e.eval_dual(x); }, a.value_or(hit->second.a),
                 b.value_or(hit->second.b));
}

// ---- tangent intersection -----------------------------------------------

struct TangentConfig {
    double parallel_rel = 1e-12; ///< eps_parallel = parallel_rel * (1 + max|f'|)
    double geo_rel = 1e-9;       ///< eps_geo = geo_rel * (x2 - x1), plus rounding of the node
};

struct TangentChordNode {
    double X = 0, Y = 0;
    double offset = 0; ///< X - x1 before rounding X
    bool parallel = false;
};

struct Sample {
    double x, y, dy;
};

/// Intersection of the tangents at two sampled points.
inline TangentChordNode tangent_node(const Sample& p, const Sample& q, const TangentConfig& cfg = {}) {
    const double h = q.x - p.x;
    if (!(h > 0)) throw DomainError("tangent_intersection needs x1 < x2");
    const double slope_gap = p.dy - q.dy;
    const double scale = 1 + std::max(std::abs(p.dy), std::abs(q.dy));
    if (std::abs(slope_gap) <= cfg.parallel_rel * scale) {
        // straight sub-arc: any point of the chord serves as the node
        const double miss = q.y - (p.y + p.dy * h);
        const double ytol = cfg.geo_rel * h * scale + 8 * std::numeric_limits<double>::epsilon() *
                                                          std::max({std::abs(p.y), std::abs(q.y), 1.0});
        if (std::abs(miss) > ytol) throw NotCavex("parallel tangents on distinct lines: inflection inside span");
        const double d = h / 2;
        return {p.x + d, p.y + (q.y - p.y) / 2, d, true};
    }
    const double num = q.y - p.y - q.dy * h;
    const double d = num / slope_gap;
    // when num is down at the rounding level of y the node is noise; allow
    // for that before blaming an inflection
    const double eps = std::numeric_limits<double>::epsilon();
    const double num_err = 4 * eps * (std::abs(p.y) + std::abs(q.y) + std::abs(q.dy * h));
    const double eps_geo = cfg.geo_rel * h + num_err / std::abs(slope_gap);
    if (!(d >= -eps_geo && d <= h + eps_geo)) {
        throw NotCavex("tangent intersection outside [" + detail::format_number(p.x) + ", " +
                       detail::format_number(q.x) + "]: inflection inside span");
    }
    const double dc = std::clamp(d, 0.0, h);
    return {p.x + dc, p.y + p.dy * dc, dc, false};
}

inline Sample sample(const Curve& c, double x) {
    const Dual d = c.eval(x);
    return {x, d.value, d.deriv};
}

inline TangentChordNode tangent_intersection(const Curve& c, double x1, double x2, const TangentConfig& cfg = {}) {
    if (!(x1 < x2) || x1 < c.a() || x2 > c.b()) throw DomainError("tangent_intersection needs a <= x1 < x2 <= b");
    return tangent_node(sample(c, x1), sample(c, x2), cfg);
}

// ---- segmentation -------------------------------------------------------

enum class Orientation { convex, concave, linear };

inline std::string_view to_string(Orientation o) {
    switch (o) {
    case Orientation::convex: return "convex";
    case Orientation::concave: return "concave";
    case Orientation::linear: return "linear";
    }
    return "?";
}

struct CavexSegment {
    double c, d;
    Orientation orientation;
};

namespace detail {

inline int sign_with_tol(double v, double tol) { return v > tol ? 1 : (v < -tol ? -1 : 0); }

} // namespace detail

/// Splits [a,b] where the grid differences of f' change sign.
inline std::vector<CavexSegment> segment_cavex(const Curve& c, int grid_n = 256) {
    if (grid_n < 16) throw DomainError("segment_cavex needs grid_n >= 16");
    const double a = c.a(), b = c.b(), span = b - a;
    std::vector<double> xs(grid_n + 1), dfs(grid_n + 1);
    for (int i = 0; i <= grid_n; ++i) {
        xs[i] = i == grid_n ? b : a + span * i / grid_n;
        dfs[i] = c.df(xs[i]);
    }
    const auto [lo_it, hi_it] = std::minmax_element(dfs.begin(), dfs.end());
    const double max_abs = std::max(std::abs(*lo_it), std::abs(*hi_it));
    const double tol = 64 * std::numeric_limits<double>::epsilon() * (1 + max_abs);
    std::vector<int> sg(grid_n);
    for (int i = 0; i < grid_n; ++i) sg[i] = detail::sign_with_tol(dfs[i + 1] - dfs[i], tol);

    // runs of constant nonzero sign, zeros absorbed
    struct Change {
        int last, next; // cell indices of the two opposing signs
    };
    std::vector<Change> changes;
    int prev = -1;
    for (int i = 0; i < grid_n; ++i) {
        if (sg[i] == 0) continue;
        if (prev >= 0 && sg[prev] != sg[i]) changes.push_back({prev, i});
        prev = i;
    }
    if (static_cast<int>(changes.size()) > grid_n / 4) {
        throw TooOscillatory(std::to_string(changes.size()) + " convexity changes on a grid of " +
                             std::to_string(grid_n) + " cells");
    }
    const int first_sign = prev < 0 ? 0 : sg[std::find_if(sg.begin(), sg.end(), [](int s) { return s != 0; }) - sg.begin()];
    auto orient = [](int s) {
        return s > 0 ? Orientation::convex : (s < 0 ? Orientation::concave : Orientation::linear);
    };
    if (changes.empty()) return {{a, b, orient(first_sign)}};

    const double delta = span * 1e-6;
    auto probe = [&](double m) {
        const double lo = std::max(a, m - delta), hi = std::min(b, m + delta);
        return c.df(hi) - c.df(lo);
    };

    std::vector<CavexSegment> out;
    double start = a;
    int sign = first_sign;
    for (const Change& ch : changes) {
        double lo = xs[ch.last], hi = xs[ch.next + 1];
        const int s_lo = sg[ch.last];
        double split;
        if (detail::sign_with_tol(probe(lo), 0) == s_lo && detail::sign_with_tol(probe(hi), 0) == -s_lo) {
            const double width = span * 1e-12;
            while (hi - lo > width) {
                const double m = lo + (hi - lo) / 2;
                if (m <= lo || m >= hi) break;
                const int s = detail::sign_with_tol(probe(m), 0);
                if (s == s_lo) {
                    lo = m;
                } else if (s == -s_lo) {
                    hi = m;
                } else {
                    lo = hi = m;
                }
            }
            split = lo + (hi - lo) / 2;
        } else {
            // probe too coarse for the bracket: split in the middle of the zero run
            split = (xs[ch.last + 1] + xs[ch.next]) / 2;
        }
        if (split > start) out.push_back({start, split, orient(sign)});
        start = split;
        sign = -sign;
    }
    if (b > start) out.push_back({start, b, orient(sign)});
    return out;
}

// ---- Lemma 3 diagnostic -------------------------------------------------

struct SlopeConvergence {
    std::vector<double> h;
    std::vector<double> gaps;
    bool strictly_decreasing = true;
};

inline SlopeConvergence secant_slope_convergence(const Curve& c, double x0, const std::vector<double>& hs) {
    SlopeConvergence r;
    const Dual base = c.eval(x0);
    for (double h : hs) {
        const double slope = (c.f(x0 + h) - base.value) / h;
        const double gap = std::abs(base.deriv - slope);
        if (!r.gaps.empty() && !(gap < r.gaps.back())) r.strictly_decreasing = false;
        r.h.push_back(h);
        r.gaps.push_back(gap);
    }
    return r;
}

/// h0, h0/2, ... (count values).
inline std::vector<double> halving(double h0, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i, h0 /= 2) out.push_back(h0);
    return out;
}

} // namespace cavex
