#pragma once

// Secant- and tangent-measures over refining partitions, the arc-length
// enclosure built from them, and the comparisons derived from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "curve.hpp"
#include "errors.hpp"
#include "scalar.hpp"

namespace cavex {

class Partition {
public:
    explicit Partition(std::vector<double> points) : pts_(std::move(points)) {
        if (pts_.size() < 2) throw DomainError("a partition needs at least two points");
        for (std::size_t i = 1; i < pts_.size(); ++i) {
            if (!(pts_[i - 1] < pts_[i])) throw DomainError("partition points must be strictly increasing");
        }
    }
    static Partition trivial(double c, double d) { return Partition({c, d}); }

    const std::vector<double>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    std::size_t intervals() const { return pts_.size() - 1; }
    double front() const { return pts_.front(); }
    double back() const { return pts_.back(); }

    Partition bisect_all() const {
        std::vector<double> out;
        out.reserve(2 * pts_.size() - 1);
        for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
            out.push_back(pts_[i]);
            out.push_back(pts_[i] + (pts_[i + 1] - pts_[i]) / 2);
        }
        out.push_back(pts_.back());
        return Partition(std::move(out));
    }

    Partition single_point(double x) const {
        if (!(x > pts_.front() && x < pts_.back())) throw DomainError("refinement point must be interior");
        auto it = std::lower_bound(pts_.begin(), pts_.end(), x);
        if (*it == x) throw DuplicatePoint("point " + detail::format_number(x) + " already in partition");
        std::vector<double> out(pts_.begin(), it);
        out.push_back(x);
        out.insert(out.end(), it, pts_.end());
        return Partition(std::move(out));
    }

private:
    std::vector<double> pts_;
};

struct MeasurePair {
    double S = 0, T = 0, gap = 0;
};

namespace detail {

inline std::vector<Sample> sample_all(const Curve& c, const std::vector<double>& xs) {
    if (xs.front() < c.a() || xs.back() > c.b()) throw DomainError("partition leaves the curve domain");
    std::vector<Sample> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(sample(c, x));
    return out;
}

inline double chord(const Sample& p, const Sample& q) { return std::hypot(q.x - p.x, q.y - p.y); }

inline double tangent_chord(const Sample& p, const Sample& q, const TangentConfig& cfg) {
    const TangentChordNode n = tangent_node(p, q, cfg);
    if (n.parallel) return chord(p, q);
    const double h = q.x - p.x;
    return n.offset * std::hypot(1.0, p.dy) + (h - n.offset) * std::hypot(1.0, q.dy);
}

inline MeasurePair measures(const std::vector<Sample>& s, const TangentConfig& cfg) {
    MeasurePair m;
    for (std::size_t i = 1; i < s.size(); ++i) {
        m.S += chord(s[i - 1], s[i]);
        m.T += tangent_chord(s[i - 1], s[i], cfg);
    }
    m.gap = m.T - m.S;
    return m;
}

/// Correctly rounded sum of doubles (Shewchuk partials with half-even fix-up).
inline double exact_sum(const std::vector<double>& xs) {
    std::vector<double> partials;
    for (double x : xs) {
        std::size_t i = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    if (partials.empty()) return 0;
    std::size_t n = partials.size();
    double hi = partials[--n];
    double lo = 0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0) break;
    }
    if (n > 0 && ((lo < 0 && partials[n - 1] < 0) || (lo > 0 && partials[n - 1] > 0))) {
        const double y = lo * 2;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

} // namespace detail

inline double secant_measure(const Curve& c, const Partition& p) {
    return detail::measures(detail::sample_all(c, p.points()), {}).S;
}

/// Throws NotCavex when an inflection lies inside a sub-interval.
inline double tangent_measure(const Curve& c, const Partition& p, const TangentConfig& cfg = {}) {
    return detail::measures(detail::sample_all(c, p.points()), cfg).T;
}

inline MeasurePair measure_pair(const Curve& c, const Partition& p, const TangentConfig& cfg = {}) {
    return detail::measures(detail::sample_all(c, p.points()), cfg);
}

/// Sum of |dx| + |dy| accumulated without rounding error, then rounded once.
/// On a monotone curve this is |b - a| + |f(b) - f(a)| for every partition.
inline double taxicab_measure(const Curve& c, const Partition& p) {
    const auto s = detail::sample_all(c, p.points());
    std::vector<double> terms;
    terms.reserve(4 * s.size());
    for (std::size_t i = 1; i < s.size(); ++i) {
        for (auto [a, b] : {std::pair{s[i].x, s[i - 1].x}, std::pair{s[i].y, s[i - 1].y}}) {
            const auto [hi, lo] = two_sum(a, -b);
            const double sign = hi < 0 || (hi == 0 && lo < 0) ? -1.0 : 1.0;
            terms.push_back(sign * hi);
            terms.push_back(sign * lo);
        }
    }
    return detail::exact_sum(terms);
}

/// False when f' takes both signs on a grid of 1024 samples.
inline bool is_monotone(const Curve& c) {
    bool pos = false, neg = false;
    for (int i = 0; i < domain_samples; ++i) {
        const double x = i + 1 == domain_samples ? c.b() : c.a() + (c.b() - c.a()) * i / (domain_samples - 1);
        const double d = c.df(x);
        pos |= d > 0;
        neg |= d < 0;
    }
    return !(pos && neg);
}

// ---- rectification ------------------------------------------------------

struct RectifyOptions {
    double tol = 1e-6;
    int max_stages = 20;
    int grid_n = 256;
    TangentConfig tangent{};
};

struct StageRow {
    int stage;
    std::size_t points;
    double secant, tangent, gap;
};

struct SegmentTrace {
    CavexSegment segment;
    double tol_share = 0;
    std::vector<StageRow> rows;
    double slack = 0;        ///< rounding allowance added outward
    double lower = 0, upper = 0;
    bool linear = false;
    bool converged = false;
    double estimate() const { return lower / 2 + upper / 2; }
};

struct RectifyResult {
    std::vector<SegmentTrace> segments;
    double lower = 0, upper = 0;
    double stage0_tangent = 0; ///< a valid rectifiability bound
    bool converged = true;
    double estimate() const { return lower / 2 + upper / 2; }
    double width() const { return upper - lower; }
};

class RectifyDidNotConverge : public DidNotConverge {
public:
    RectifyDidNotConverge(const std::string& what, RectifyResult partial)
        : DidNotConverge(what), partial_(std::move(partial)) {}
    const RectifyResult& partial() const noexcept { return partial_; }

private:
    RectifyResult partial_;
};

namespace detail {

inline double rounding_slack(const std::vector<Sample>& s, double T) {
    double scale = std::abs(T);
    for (const Sample& p : s) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    return 8 * ulp(scale) * static_cast<double>(s.size() - 1);
}

/// Dyadic refinement of one segment until gap plus slack fits its share.
inline SegmentTrace rectify_segment(const Curve& c, const CavexSegment& seg, double tol_share, int max_stages,
                                    const TangentConfig& cfg) {
    SegmentTrace tr;
    tr.segment = seg;
    tr.tol_share = tol_share;
    std::vector<Sample> s = {sample(c, seg.c), sample(c, seg.d)};
    for (int stage = 0;; ++stage) {
        MeasurePair m = measures(s, cfg);
        if (stage == 0 && m.gap <= 4 * ulp(m.S)) {
            tr.linear = true;
            m.T = m.S;
            m.gap = 0;
        }
        tr.rows.push_back({stage, s.size(), m.S, m.T, m.gap});
        tr.slack = tr.linear ? 0 : rounding_slack(s, m.T);
        tr.lower = m.S - tr.slack;
        tr.upper = m.T + tr.slack;
        if (tr.linear || m.gap + 2 * tr.slack <= tol_share) {
            tr.converged = true;
            return tr;
        }
        if (stage >= max_stages) return tr;
        std::vector<Sample> next;
        next.reserve(2 * s.size() - 1);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            next.push_back(s[i]);
            next.push_back(sample(c, s[i].x + (s[i + 1].x - s[i].x) / 2));
        }
        next.push_back(s.back());
        s = std::move(next);
    }
}

} // namespace detail

/// Encloses the arc length of c to width tol. Throws RectifyDidNotConverge
/// (holding the partial trace) when max_stages is reached first.
inline RectifyResult rectify(const Curve& c, const RectifyOptions& opt = {}) {
    if (!(opt.tol > 0)) throw DomainError("rectify needs tol > 0");
    if (opt.max_stages < 0) throw DomainError("rectify needs max_stages >= 0");
    const auto segs = segment_cavex(c, opt.grid_n);
    std::vector<double> chords;
    double total_chord = 0;
    for (const auto& sg : segs) {
        chords.push_back(detail::chord(sample(c, sg.c), sample(c, sg.d)));
        total_chord += chords.back();
    }
    RectifyResult r;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const double share = total_chord > 0 ? opt.tol * chords[i] / total_chord : opt.tol / segs.size();
        r.segments.push_back(detail::rectify_segment(c, segs[i], share, opt.max_stages, opt.tangent));
        const SegmentTrace& t = r.segments.back();
        r.lower += t.lower;
        r.upper += t.upper;
        r.stage0_tangent += t.rows.front().tangent;
        r.converged = r.converged && t.converged;
    }
    if (!r.converged) {
        throw RectifyDidNotConverge("arc length of '" + c.name() + "' did not reach tol " +
                                        detail::format_number(opt.tol) + " within " +
                                        std::to_string(opt.max_stages) + " stages",
                                    r);
    }
    return r;
}

// ---- comparisons --------------------------------------------------------

struct ChordReport {
    double chord = 0;
    double lower = 0, upper = 0;
    bool linear = false;
    bool holds = false; ///< chord < lower, or equality on a line
};

/// Chord against the rectified arc over [x1,x2], which must lie in one cavex segment.
inline ChordReport chord_vs_arc(const Curve& c, double x1, double x2, const TangentConfig& cfg = {}) {
    const Curve part = c.restricted(x1, x2);
    const auto segs = segment_cavex(part, 64);
    if (segs.size() != 1) throw NotCavex("span contains an inflection");
    const std::vector<Sample> ends = {sample(part, x1), sample(part, x2)};
    const MeasurePair m0 = detail::measures(ends, cfg);
    ChordReport r;
    r.chord = m0.S;
    const SegmentTrace t0 = detail::rectify_segment(part, segs.front(), 0, 0, cfg);
    r.linear = t0.linear;
    r.lower = t0.lower;
    r.upper = t0.upper;
    // slack grows with the point count while the gap shrinks, so keep the
    // best bounds seen and stop once refining no longer pays
    std::vector<Sample> s = ends;
    for (int stage = 1; !r.linear && stage <= 16; ++stage) {
        std::vector<Sample> next;
        next.reserve(2 * s.size() - 1);
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            next.push_back(s[i]);
            next.push_back(sample(part, s[i].x + (s[i + 1].x - s[i].x) / 2));
        }
        next.push_back(s.back());
        s = std::move(next);
        const MeasurePair m = detail::measures(s, cfg);
        const double slack = detail::rounding_slack(s, m.T);
        r.lower = std::max(r.lower, m.S - slack);
        r.upper = std::min(r.upper, m.T + slack);
        if (m.gap < slack || m.gap <= m0.gap * 1e-4) break;
    }
    r.holds = r.linear ? (r.lower == r.chord && r.upper == r.chord) : r.chord < r.lower;
    return r;
}

enum class NestOrder { inner_shorter, undecided, violated };

inline std::string_view to_string(NestOrder o) {
    switch (o) {
    case NestOrder::inner_shorter: return "inner shorter";
    case NestOrder::undecided: return "undecided at tolerance";
    case NestOrder::violated: return "inner longer";
    }
    return "?";
}

struct NestReport {
    int samples = 0;
    double max_violation = 0; ///< worst sampled departure from the nesting (<= tolerance)
    RectifyResult inner, outer;
    NestOrder order = NestOrder::undecided;
};

/// Checks inner lies between the chord and outer, then rectifies both.
inline NestReport compare_nested(const Curve& inner, const Curve& outer, double tol = 1e-7) {
    if (inner.a() != outer.a() || inner.b() != outer.b()) throw NotNested("curves must share the domain");
    const double a = inner.a(), b = inner.b();
    const double ya = outer.f(a), yb = outer.f(b);
    const double scale = 1 + std::max({std::abs(ya), std::abs(yb), std::abs(a), std::abs(b)});
    const double ytol = 1e-12 * scale;
    if (std::abs(inner.f(a) - ya) > ytol || std::abs(inner.f(b) - yb) > ytol) {
        throw NotNested("curves must share endpoint values");
    }
    const auto si = segment_cavex(inner, 256);
    const auto so = segment_cavex(outer, 256);
    if (so.size() != 1 || so.front().orientation == Orientation::linear) {
        throw NotNested("outer curve must be a single strict cavex segment");
    }
    if (si.size() != 1 || (si.front().orientation != Orientation::linear &&
                           si.front().orientation != so.front().orientation)) {
        throw NotNested("inner curve must be linear or share the outer orientation");
    }
    // outer sits below the chord when convex, above when concave
    const double side = so.front().orientation == Orientation::convex ? 1.0 : -1.0;
    NestReport r;
    r.samples = domain_samples;
    for (int i = 1; i + 1 < domain_samples; ++i) {
        const double x = a + (b - a) * i / (domain_samples - 1);
        const double chord_y = ya + (yb - ya) * ((x - a) / (b - a));
        const double fi = inner.f(x), fo = outer.f(x);
        const double v = std::max(side * (fi - chord_y), side * (fo - fi));
        r.max_violation = std::max(r.max_violation, v);
        if (v > ytol) {
            throw NotNested("inner curve leaves the region between chord and outer near x=" + detail::format_number(x));
        }
    }
    RectifyOptions opt;
    opt.tol = tol;
    opt.max_stages = 24;
    r.inner = rectify(inner, opt);
    r.outer = rectify(outer, opt);
    if (r.inner.upper <= r.outer.lower) {
        r.order = NestOrder::inner_shorter;
    } else if (r.inner.lower > r.outer.upper) {
        r.order = NestOrder::violated;
    }
    return r;
}

} // namespace cavex
