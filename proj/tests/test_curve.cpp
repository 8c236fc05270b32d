#include <catch_amalgamated.hpp>

#include <cavex/curve.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace cavex;

TEST_CASE("curve construction validates the domain") {
    CHECK_THROWS_AS(Curve::from_expr("x^2", 1, 1), DomainError);
    CHECK_THROWS_AS(Curve::from_expr("x^2", 2, 1), DomainError);
    CHECK_THROWS_AS(Curve::from_expr("log(x)", 0, 1), DomainError);
    CHECK_THROWS_AS(Curve::from_expr("sqrt(1 - x^2)", 0, 1), DomainError);
    CHECK_THROWS_AS(registry_curve("quarter_circle", 0.0, 1.5), DomainError);
    CHECK_THROWS_AS(registry_curve("hyperbola"), DomainError);
    const Curve q = registry_curve("quarter_circle");
    CHECK(q.b() == 1.0 - quarter_circle_edge);
    CHECK(registry_curve("log").f(2) == std::log(2.0));
    const Curve l = registry_curve("line(2,-1)");
    CHECK(l.f(3) == 5.0);
    CHECK(l.df(0.2) == 2.0);
    CHECK(registry_names().size() == 6);
}

TEST_CASE("tangent intersection examples") {
    const Curve sq = Curve::from_expr("x^2", -2, 2);
    const auto n = tangent_intersection(sq, 0, 1);
    CHECK(n.X == 0.5);
    CHECK(n.Y == 0.0);
    CHECK_FALSE(n.parallel);

    const Curve line = registry_curve("line(3,1)", -5.0, 5.0);
    const auto m = tangent_intersection(line, -1, 2);
    CHECK(m.parallel);
    CHECK(m.X == 0.5);
    CHECK(m.Y == 2.5);

    const Curve cube = Curve::from_expr("x^3", -1, 1);
    CHECK_THROWS_AS(tangent_intersection(cube, -1, 1), NotCavex);
    CHECK_THROWS_AS(tangent_intersection(cube, -0.5, 0.8), NotCavex);
    CHECK_THROWS_AS(tangent_intersection(sq, 1, 1), DomainError);

    const Curve s = registry_curve("sin");
    const auto k = tangent_intersection(s, 1, 2.5);
    CHECK(k.X > 1);
    CHECK(k.X < 2.5);
}

TEST_CASE("tangent nodes stay inside strict cavex spans") {
    std::mt19937_64 rng(3);
    for (const auto& name : registry_names()) {
        if (name == "line") continue;
        const Curve c = registry_curve(name);
        for (const auto& seg : segment_cavex(c, 64)) {
            std::uniform_real_distribution<double> u(seg.c, seg.d);
            for (int i = 0; i < 1000; ++i) {
                double x1 = u(rng), x2 = u(rng);
                if (x1 > x2) std::swap(x1, x2);
                if (x2 - x1 < 1e-6 * (seg.d - seg.c)) continue;
                const auto n = tangent_intersection(c, x1, x2);
                INFO(name << " [" << x1 << ", " << x2 << "] X=" << n.X);
                CHECK(x1 < n.X);
                CHECK(n.X < x2);
            }
        }
    }
}

TEST_CASE("segmentation examples") {
    const auto p = segment_cavex(Curve::from_expr("x^2", -1, 1), 64);
    REQUIRE(p.size() == 1);
    CHECK(p[0].orientation == Orientation::convex);
    CHECK(p[0].c == -1.0);
    CHECK(p[0].d == 1.0);

    const auto c = segment_cavex(Curve::from_expr("x^3", -1, 1), 64);
    REQUIRE(c.size() == 2);
    CHECK(c[0].orientation == Orientation::concave);
    CHECK(c[1].orientation == Orientation::convex);
    CHECK(std::abs(c[0].d) <= 1e-12);
    CHECK(c[0].d == c[1].c);
    CHECK(c[0].c == -1.0);
    CHECK(c[1].d == 1.0);

    const auto s = segment_cavex(Curve::from_expr("sin(x)", 0, 2 * std::numbers::pi), 128);
    REQUIRE(s.size() == 2);
    CHECK(std::abs(s[0].d - std::numbers::pi) <= 1e-9);
    CHECK(s[0].orientation == Orientation::concave);

    const auto l = segment_cavex(registry_curve("line"), 16);
    REQUIRE(l.size() == 1);
    CHECK(l[0].orientation == Orientation::linear);

    CHECK_THROWS_AS(segment_cavex(Curve::from_expr("x^2", 0, 1), 8), DomainError);
    CHECK_THROWS_AS(segment_cavex(Curve::from_expr("sin(x)", 0, 60), 64), TooOscillatory);

    const auto w = segment_cavex(Curve::from_expr("sin(x)", -7, 7), 256);
    REQUIRE(w.size() == 6);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        CHECK(std::abs(std::remainder(w[i].d, std::numbers::pi)) <= 1e-9);
        CHECK(w[i].orientation != w[i + 1].orientation);
    }
}

TEST_CASE("segments keep f' monotone on fresh samples") {
    const char* srcs[] = {"x^3 - x", "sin(x)", "exp(-x^2)", "x^5 - 3*x^3", "log(x + 3)"};
    for (const char* src : srcs) {
        const Curve c = Curve::from_expr(src, -2.5, 2.5);
        const auto segs = segment_cavex(c, 128);
        double covered = segs.front().c;
        for (const auto& seg : segs) {
            CHECK(seg.c == covered);
            covered = seg.d;
            std::vector<double> d;
            for (int i = 0; i < 256; ++i) d.push_back(c.df(seg.c + (seg.d - seg.c) * (i + 0.37) / 256));
            const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
            const double tol = 1e-10 * (1 + (*hi - *lo));
            const double dir = seg.orientation == Orientation::convex ? 1 : -1;
            for (std::size_t i = 1; i < d.size(); ++i) {
                INFO(src << " segment [" << seg.c << ", " << seg.d << "]");
                CHECK(dir * (d[i] - d[i - 1]) >= -tol);
            }
        }
        CHECK(covered == c.b());
    }
}

TEST_CASE("secant slope convergence") {
    const auto r = secant_slope_convergence(Curve::from_expr("x^2", 0, 1), 0, {1, 0.5, 0.25, 0.125});
    CHECK(r.gaps == std::vector<double>{1, 0.5, 0.25, 0.125});
    CHECK(r.strictly_decreasing);

    const auto l = secant_slope_convergence(registry_curve("line(2,0)"), 0.25, halving(0.5, 6));
    for (double g : l.gaps) CHECK(g == 0.0);

    const auto e = secant_slope_convergence(registry_curve("exp"), 0, halving(0.5, 11));
    CHECK(e.strictly_decreasing);
    CHECK(e.gaps.back() < 1e-3);
}

TEST_CASE("secant slope gaps decrease for registry curves") {
    std::mt19937_64 rng(17);
    for (const auto& name : registry_names()) {
        if (name == "line") continue;
        const Curve c = registry_curve(name);
        const auto segs = segment_cavex(c, 64);
        for (int i = 0; i < 20; ++i) {
            const auto& seg = segs[i % segs.size()];
            std::uniform_real_distribution<double> u(seg.c, seg.d - (seg.d - seg.c) * 0.1);
            const double x0 = u(rng);
            const double h0 = std::min(0.1 * (seg.d - seg.c), (seg.d - x0) / 2);
            const auto r = secant_slope_convergence(c, x0, halving(h0, 11));
            INFO(name << " x0=" << x0);
            CHECK(r.strictly_decreasing);
        }
    }
}
