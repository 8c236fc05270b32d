#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include <cavex/curve.hpp>
#include <cavex/oracle.hpp>
#include <cavex/pi_engine.hpp>
#include <cavex/rectify.hpp>

#include "report.hpp"

namespace cavex::cli {
namespace {

constexpr int default_precision_bits = 128;

struct Output {
    std::string format = "table";
    std::string path;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "table"}));
        cmd.add_option("--out", path, "Write output to FILE instead of stdout");
    }
};

struct CurveArgs {
    std::string name;
    std::string fn;
    std::optional<double> from, to;

    void add_to(CLI::App& cmd) {
        auto* c = cmd.add_option("--curve", name, "Registry curve: line(m,c), parabola, quarter_circle, exp, log, sin");
        auto* f = cmd.add_option("--fn", fn, "Curve expression in x");
        c->excludes(f);
        cmd.add_option("--from", from, "Left end of the domain");
        cmd.add_option("--to", to, "Right end of the domain");
    }

    Curve build() const {
        if (name.empty() && fn.empty()) throw DomainError("one of --curve or --fn is required");
        if (!name.empty()) return registry_curve(name, from, to);
        if (!from || !to) throw DomainError("--fn needs --from and --to");
        return Curve::from_expr(fn, *from, *to);
    }
};

/// Runs `body` writing to stdout or the --out file, mapping errors to exit codes.
int guarded(const Output& o, std::ostream& out, std::ostream& err, const std::function<int(std::ostream&)>& body) {
    std::ofstream file;
    std::ostream* os = &out;
    if (!o.path.empty()) {
        file.open(o.path);
        if (!file) {
            err << "error: cannot open " << o.path << " for writing\n";
            return usage;
        }
        os = &file;
    }
    try {
        return body(*os);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const UnsupportedK& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const PrecisionExhausted& e) {
        err << "error: " << e.what() << '\n';
        return convergence;
    } catch (const DidNotConverge& e) {
        err << "error: " << e.what() << '\n';
        return convergence;
    } catch (const MaxDepthExceeded& e) {
        err << "error: " << e.what() << '\n';
        return convergence;
    } catch (const TooOscillatory& e) {
        err << "error: " << e.what() << '\n';
        return segmentation;
    } catch (const NotCavex& e) {
        err << "error: " << e.what() << '\n';
        return segmentation;
    } catch (const NotNested& e) {
        err << "error: " << e.what() << '\n';
        return nesting;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

// ---- pi -------------------------------------------------------------------

template <class T>
void write_pi_trace(std::ostream& os, const PiRun<T>& r, Format f) {
    Table t({"stage", "sides", "lower", "upper", "width"});
    for (const auto& e : r.trace) {
        std::string lo, hi, w;
        if constexpr (std::is_same_v<T, double>) {
            lo = fmt(e.lower);
            hi = fmt(e.upper);
            w = fmt(e.width);
        } else {
            // digits implied by the width plus two, never fewer than a double
            // shows, capped by the working precision
            const double wd = e.width.to_double();
            const int cap = static_cast<int>(std::ceil(e.width.bits() * std::log10(2.0))) + 2;
            const int implied = wd > 0 ? static_cast<int>(std::ceil(-std::log10(wd))) + 2 : cap;
            const int digits = std::min(std::max(implied, 16), cap);
            lo = e.lower.to_decimal(digits, Rounding::down);
            hi = e.upper.to_decimal(digits, Rounding::up);
            w = e.width.to_decimal(digits + 2, Rounding::up);
        }
        t.add({num(std::to_string(e.stage)), num(std::to_string(e.sides)), num(lo), num(hi), num(w)});
    }
    t.write(os, f);
}

struct PiArgs {
    int k = 6;
    std::optional<int> stages;
    std::optional<double> width_tol;
    int bits = default_precision_bits;
    bool naive = false;
    Output output;
};

template <class T>
int run_pi(const PiArgs& a, std::ostream& os, std::ostream& err) {
    StopRule stop;
    stop.max_stages = a.stages;
    stop.width_tol = a.width_tol;
    if (!stop.max_stages && !stop.width_tol) stop.max_stages = 10;
    const auto r = run<T>(a.k, stop, a.bits, a.naive ? Recurrence::naive : Recurrence::stable);
    write_pi_trace(os, r, parse_format(a.output.format));
    if (r.exhausted) {
        err << "error: precision exhausted after stage " << r.final().stage << ": " << r.reason << '\n';
        return convergence;
    }
    return ok;
}

void add_pi(CLI::App& app, PiArgs& a, std::function<int()>& action, std::ostream& out, std::ostream& err) {
    auto* cmd = app.add_subcommand("pi", "Enclose pi by polygon doubling");
    cmd->add_option("--k", a.k, "Sides of the starting polygon (3, 4 or 6)")->required();
    auto* s = cmd->add_option("--stages", a.stages, "Number of doubling stages")->check(CLI::NonNegativeNumber);
    auto* w = cmd->add_option("--width-tol", a.width_tol, "Stop once the enclosure width is at most W")
                  ->check(CLI::PositiveNumber);
    s->excludes(w);
    cmd->add_option("--precision-bits", a.bits, "53 or 64 for binary64, otherwise big-float mantissa bits")
        ->envname("CAVEX_PRECISION_BITS")
        ->check(CLI::Range(BigFloat::min_bits, BigFloat::max_bits));
    cmd->add_flag("--naive-recurrence", a.naive, "Use the cancellation-prone half-side formula");
    a.output.add_to(*cmd);
    cmd->callback([&] {
        action = [&] {
            return guarded(a.output, out, err, [&](std::ostream& os) {
                if (a.bits == 53 || a.bits == 64) return run_pi<double>(a, os, err);
                return run_pi<BigFloat>(a, os, err);
            });
        };
    });
}

// ---- arclen ---------------------------------------------------------------

struct ArclenArgs {
    CurveArgs curve;
    double tol = 1e-6;
    int max_stages = 20;
    int grid = 256;
    bool oracle = false;
    Output output;
};

void write_rectify(std::ostream& os, const RectifyResult& r, const Summary& extra, Format f) {
    Table trace({"segment", "stage", "points", "secant", "tangent", "gap"});
    Table segs({"segment", "from", "to", "orientation", "tol_share", "lower", "upper"});
    for (std::size_t i = 0; i < r.segments.size(); ++i) {
        const auto& s = r.segments[i];
        for (const auto& row : s.rows) {
            trace.add({num(std::to_string(i)), num(std::to_string(row.stage)), num(std::to_string(row.points)),
                       num(fmt(row.secant)), num(fmt(row.tangent)), num(fmt(row.gap))});
        }
        segs.add({num(std::to_string(i)), num(fmt(s.segment.c)), num(fmt(s.segment.d)),
                  txt(std::string(to_string(s.segment.orientation))), num(fmt(s.tol_share)), num(fmt(s.lower)),
                  num(fmt(s.upper))});
    }
    Summary total;
    total.add("lower", num(fmt(r.lower)));
    total.add("upper", num(fmt(r.upper)));
    total.add("width", num(fmt(r.width())));
    total.add("estimate", num(fmt(r.estimate())));
    total.add("rectifiability_bound", num(fmt(r.stage0_tangent)));
    total.add("converged", num(r.converged ? "true" : "false"));

    if (f == Format::json) {
        os << "{\n  \"trace\": ";
        trace.write_json(os, 2);
        os << ",\n  \"segments\": ";
        segs.write_json(os, 2);
        os << ",\n  \"total\": ";
        total.write_json_object(os);
        os << ",\n  \"oracle\": ";
        extra.write_json_object(os);
        os << "\n}\n";
        return;
    }
    trace.write(os, f);
    os << '\n';
    segs.write(os, f);
    os << '\n';
    total.write(os, f);
    std::ostringstream tail;
    extra.write(tail, f);
    const std::string t = tail.str();
    if (t != "quantity,value\n" && !t.empty()) os << '\n' << t;
}

int run_arclen(const ArclenArgs& a, std::ostream& os, std::ostream& err) {
    const Curve c = a.curve.build();
    RectifyOptions opt;
    opt.tol = a.tol;
    opt.max_stages = a.max_stages;
    opt.grid_n = a.grid;
    const Format f = parse_format(a.output.format);
    RectifyResult r;
    bool converged = true;
    std::string failure_msg;
    try {
        r = rectify(c, opt);
    } catch (const RectifyDidNotConverge& e) {
        r = e.partial();
        converged = false;
        failure_msg = e.what();
    }
    Summary extra;
    if (a.oracle) {
        const double qtol = std::max(1e-12, a.tol * 1e-3);
        const QuadratureResult q = arclength_integral(c, qtol);
        const double delta = std::abs(q.value - r.estimate());
        const double bound = r.width() / 2 + q.error_estimate;
        extra.add("oracle", num(fmt(q.value)));
        extra.add("oracle_error", num(fmt(q.error_estimate)));
        extra.add("oracle_evaluations", num(std::to_string(q.evaluations)));
        extra.add("oracle_delta", num(fmt(delta)));
        extra.add("oracle_delta_bound", num(fmt(bound)));
        extra.add("oracle_agrees", num(delta <= bound ? "true" : "false"));
    }
    write_rectify(os, r, extra, f);
    if (!converged) {
        err << "error: " << failure_msg << '\n';
        return convergence;
    }
    return ok;
}

void add_arclen(CLI::App& app, ArclenArgs& a, std::function<int()>& action, std::ostream& out, std::ostream& err) {
    auto* cmd = app.add_subcommand("arclen", "Enclose the arc length of a curve");
    a.curve.add_to(*cmd);
    cmd->add_option("--tol", a.tol, "Target enclosure width")->check(CLI::PositiveNumber);
    cmd->add_option("--max-stages", a.max_stages, "Refinement stages per segment")->check(CLI::Range(0, 26));
    cmd->add_option("--grid", a.grid, "Grid cells for convexity detection")->check(CLI::Range(16, 1 << 20));
    cmd->add_flag("--oracle", a.oracle, "Append the quadrature value and its agreement");
    a.output.add_to(*cmd);
    cmd->callback([&] {
        action = [&] { return guarded(a.output, out, err, [&](std::ostream& os) { return run_arclen(a, os, err); }); };
    });
}

// ---- metric-demo ----------------------------------------------------------

struct MetricArgs {
    CurveArgs curve;
    int partitions = 10;
    std::uint64_t seed = 1;
    Output output;
};

int run_metric(const MetricArgs& a, std::ostream& os) {
    const Curve c = a.curve.build();
    if (!is_monotone(c)) throw DomainError("taxicab demo needs a monotone curve; '" + c.name() + "' is not");
    const double oracle = arclength_integral(c, 1e-10).value;
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> u(c.a(), c.b());
    std::set<double> pts{c.a(), c.b()};
    Table t({"partition", "points", "taxicab", "secant", "oracle"});
    for (int i = 0; i < a.partitions; ++i) {
        // nested refinements: partition i adds i + 1 random points
        const std::size_t want = pts.size() + static_cast<std::size_t>(i) + 1;
        while (pts.size() < want) {
            const double x = u(rng);
            if (x > c.a() && x < c.b()) pts.insert(x);
        }
        const Partition p({pts.begin(), pts.end()});
        t.add({num(std::to_string(i)), num(std::to_string(p.size())), num(fmt(taxicab_measure(c, p))),
               num(fmt(secant_measure(c, p))), num(fmt(oracle))});
    }
    t.write(os, parse_format(a.output.format));
    return ok;
}

void add_metric(CLI::App& app, MetricArgs& a, std::function<int()>& action, std::ostream& out, std::ostream& err) {
    auto* cmd = app.add_subcommand("metric-demo", "Taxicab sums against secant sums on random partitions");
    a.curve.add_to(*cmd);
    cmd->add_option("--partitions", a.partitions, "Number of random partitions")->check(CLI::Range(1, 10000));
    cmd->add_option("--seed", a.seed, "Random seed");
    a.output.add_to(*cmd);
    cmd->callback([&] {
        action = [&] { return guarded(a.output, out, err, [&](std::ostream& os) { return run_metric(a, os); }); };
    });
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
    std::string inner, outer;
    double from = 0, to = 1;
    double tol = 1e-7;
    Output output;
};

int run_compare(const CompareArgs& a, std::ostream& os) {
    const Curve inner = Curve::from_expr(a.inner, a.from, a.to);
    const Curve outer = Curve::from_expr(a.outer, a.from, a.to);
    const NestReport r = compare_nested(inner, outer, a.tol);
    Summary s;
    s.add("containment", txt("verified"));
    s.add("samples", num(std::to_string(r.samples)));
    s.add("max_violation", num(fmt(r.max_violation)));
    s.add("inner_lower", num(fmt(r.inner.lower)));
    s.add("inner_upper", num(fmt(r.inner.upper)));
    s.add("outer_lower", num(fmt(r.outer.lower)));
    s.add("outer_upper", num(fmt(r.outer.upper)));
    s.add("verdict", txt(std::string(to_string(r.order))));
    const Format f = parse_format(a.output.format);
    s.write(os, f);
    if (f == Format::json) os << '\n';
    return r.order == NestOrder::violated ? nesting : ok;
}

void add_compare(CLI::App& app, CompareArgs& a, std::function<int()>& action, std::ostream& out, std::ostream& err) {
    auto* cmd = app.add_subcommand("compare", "Check that a nested curve is the shorter one");
    cmd->add_option("--inner", a.inner, "Curve between the chord and the outer curve")->required();
    cmd->add_option("--outer", a.outer, "Outer curve")->required();
    cmd->add_option("--from", a.from, "Left end of the domain")->required();
    cmd->add_option("--to", a.to, "Right end of the domain")->required();
    cmd->add_option("--tol", a.tol, "Enclosure width for each curve")->check(CLI::PositiveNumber);
    a.output.add_to(*cmd);
    cmd->callback([&] {
        action = [&] { return guarded(a.output, out, err, [&](std::ostream& os) { return run_compare(a, os); }); };
    });
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified enclosures of pi and of arc lengths of convex/concave curves", "cavex"};
    app.require_subcommand(1);
    std::function<int()> action;
    PiArgs pi;
    ArclenArgs arclen;
    MetricArgs metric;
    CompareArgs compare;
    add_pi(app, pi, action, out, err);
    add_arclen(app, arclen, action, out, err);
    add_metric(app, metric, action, out, err);
    add_compare(app, compare, action, out, err);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return usage;
    }
    return action ? action() : usage;
}

} // namespace cavex::cli
