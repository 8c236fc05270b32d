#include <catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <random>

#include <cavex/bigfloat.hpp>
#include <cavex/interval.hpp>
#include <cavex/scalar.hpp>

using namespace cavex;
using Rational = boost::multiprecision::cpp_rational;
using Float256 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

namespace {

Rational exact(double x) { return Rational(x); }

Rational exact(const BigFloat& x) {
    Rational r(x.mantissa());
    if (x.exponent() >= 0) return r * Rational(BigFloat::Int(1) << static_cast<unsigned>(x.exponent()));
    return r / Rational(BigFloat::Int(1) << static_cast<unsigned>(-x.exponent()));
}

// Newton iteration for sqrt at 256 bits; independent of the library's big-float.
Float256 newton_sqrt(const Float256& x) {
    Float256 y = std::sqrt(x.convert_to<double>());
    for (int i = 0; i < 12; ++i) y = (y + x / y) / 2;
    return y;
}

int ulps_between(double a, double b) {
    int n = 0;
    while (a < b && n < 100) {
        a = next_up(a);
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("exact results are unchanged in both directions", "[scalar]") {
    CHECK(cavex::sqrt(4.0, Rounding::down) == 2.0);
    CHECK(cavex::sqrt(4.0, Rounding::up) == 2.0);
    CHECK(add(1.0, 2.0, Rounding::down) == 3.0);
    CHECK(add(1.0, 2.0, Rounding::up) == 3.0);
    CHECK(mul(1.5, 4.0, Rounding::up) == 6.0);
    CHECK(cavex::div(1.0, 4.0, Rounding::down) == 0.25);
    CHECK(round_dir(Op::sqrt, 0.25, 0, Rounding::up) == 0.5);
}

TEST_CASE("sqrt(2) is bracketed by the 256-bit Newton oracle", "[scalar]") {
    const double lo = cavex::sqrt(2.0, Rounding::down);
    const double hi = cavex::sqrt(2.0, Rounding::up);
    const Float256 ref = newton_sqrt(Float256(2));
    CHECK(Float256(lo) <= ref);
    CHECK(ref <= Float256(hi));
    CHECK(lo < hi);
    CHECK(ulps_between(lo, hi) <= 2);
    CHECK(std::fabs(lo - 1.41421356237309) < 1e-14);
}

TEST_CASE("nonrepresentable rationals are bracketed", "[scalar]") {
    const double lo = cavex::div(1.0, 3.0, Rounding::down);
    const double hi = cavex::div(1.0, 3.0, Rounding::up);
    CHECK(exact(lo) < Rational(1, 3));
    CHECK(Rational(1, 3) < exact(hi));
    CHECK(next_up(lo) == hi);
}

TEST_CASE("domain and overflow errors", "[scalar]") {
    CHECK_THROWS_AS(cavex::sqrt(-1.0, Rounding::down), DomainError);
    CHECK_THROWS_AS(cavex::div(1.0, 0.0, Rounding::up), DomainError);
    CHECK_THROWS_AS(mul(1e308, 10.0, Rounding::up), OverflowError);
    CHECK_THROWS_AS(add(std::nan(""), 1.0, Rounding::up), DomainError);
    CHECK_THROWS_AS(BigFloat::sqrt(BigFloat::from_int(-4, 64), Rounding::up), DomainError);
    CHECK_THROWS_AS(BigFloat::div(BigFloat::from_int(1, 64), BigFloat::zero(64), Rounding::up), DomainError);
    CHECK_THROWS_AS(BigFloat::zero(2), DomainError);
}

TEST_CASE("directed binary64 operations contain the exact result", "[scalar][property]") {
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-40, 40);
    auto draw = [&] { return std::ldexp(mant(rng), expo(rng)); };

    for (int i = 0; i < 100000; ++i) {
        const double a = draw();
        double b = draw();
        if (b == 0) b = 1;
        const Rational ea = exact(a), eb = exact(b);
        switch (i % 5) {
        case 0:
            REQUIRE(exact(add(a, b, Rounding::down)) <= ea + eb);
            REQUIRE(ea + eb <= exact(add(a, b, Rounding::up)));
            break;
        case 1:
            REQUIRE(exact(sub(a, b, Rounding::down)) <= ea - eb);
            REQUIRE(ea - eb <= exact(sub(a, b, Rounding::up)));
            break;
        case 2:
            REQUIRE(exact(mul(a, b, Rounding::down)) <= ea * eb);
            REQUIRE(ea * eb <= exact(mul(a, b, Rounding::up)));
            break;
        case 3:
            REQUIRE(exact(cavex::div(a, b, Rounding::down)) <= ea / eb);
            REQUIRE(ea / eb <= exact(cavex::div(a, b, Rounding::up)));
            break;
        case 4: {
            const double x = std::fabs(a);
            const double lo = cavex::sqrt(x, Rounding::down);
            const double hi = cavex::sqrt(x, Rounding::up);
            REQUIRE(exact(lo) * exact(lo) <= exact(x));
            REQUIRE(exact(x) <= exact(hi) * exact(hi));
            REQUIRE(ulps_between(lo, hi) <= 2);
            break;
        }
        }
    }
}

TEST_CASE("big-float operations are correctly rounded in the requested direction", "[scalar][bigfloat][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mant(-1.0, 1.0);
    std::uniform_int_distribution<int> expo(-30, 30);
    std::uniform_int_distribution<int> bits(16, 200);

    for (int i = 0; i < 4000; ++i) {
        const int p = bits(rng);
        // operands with more bits than a double by combining two draws
        const BigFloat a = BigFloat::add(BigFloat::from_double(std::ldexp(mant(rng), expo(rng)), 256),
                                         BigFloat::from_double(std::ldexp(mant(rng), expo(rng) - 60), 256),
                                         Rounding::down)
                               .with_bits(p, Rounding::down);
        BigFloat b = BigFloat::from_double(std::ldexp(mant(rng), expo(rng)), p);
        if (b.is_zero()) b = BigFloat::from_int(3, p);
        const Rational ea = exact(a), eb = exact(b);

        const auto check = [&](auto op, const Rational& truth) {
            const BigFloat lo = op(Rounding::down);
            const BigFloat hi = op(Rounding::up);
            REQUIRE(exact(lo) <= truth);
            REQUIRE(truth <= exact(hi));
            // adjacent or equal at precision p
            if (exact(lo) != exact(hi)) {
                const Rational gap = exact(hi) - exact(lo);
                const Rational mag = boost::multiprecision::abs(exact(hi)) + boost::multiprecision::abs(exact(lo));
                REQUIRE(gap * (BigFloat::Int(1) << static_cast<unsigned>(p - 2)) <= mag);
            }
        };
        check([&](Rounding d) { return BigFloat::add(a, b, d); }, ea + eb);
        check([&](Rounding d) { return BigFloat::sub(a, b, d); }, ea - eb);
        check([&](Rounding d) { return BigFloat::mul(a, b, d); }, ea * eb);
        check([&](Rounding d) { return BigFloat::div(a, b, d); }, ea / eb);

        const BigFloat x = a.sign() < 0 ? -a : a;
        if (!x.is_zero()) {
            const BigFloat lo = BigFloat::sqrt(x, Rounding::down);
            const BigFloat hi = BigFloat::sqrt(x, Rounding::up);
            REQUIRE(exact(lo) * exact(lo) <= exact(x));
            REQUIRE(exact(x) <= exact(hi) * exact(hi));
        }
    }
}

TEST_CASE("big-float sqrt(2) at 256 bits matches the Newton oracle", "[scalar][bigfloat]") {
    const BigFloat two = BigFloat::from_int(2, 256);
    const BigFloat lo = BigFloat::sqrt(two, Rounding::down);
    const BigFloat hi = BigFloat::sqrt(two, Rounding::up);
    const Float256 ref = newton_sqrt(Float256(2));
    CHECK(lo.to_decimal(70, Rounding::down) == "1.4142135623730950488016887242096980785696718753769480731766797379907324");
    CHECK(BigFloat::compare(lo, hi) < 0);
    CHECK(abs(Float256(lo.to_decimal(76, Rounding::down)) - ref) < Float256(1e-74));
    CHECK(BigFloat::sqrt(BigFloat::from_int(9, 64), Rounding::up).to_decimal(3, Rounding::up) == "3.000");
    CHECK(BigFloat::isqrt(BigFloat::Int(99)) == 9);
    CHECK(BigFloat::isqrt(BigFloat::Int(100)) == 10);
}

TEST_CASE("big-float decimal output rounds toward the requested side", "[scalar][bigfloat]") {
    const BigFloat third = BigFloat::div(BigFloat::from_int(1, 128), BigFloat::from_int(3, 128), Rounding::down);
    CHECK(third.to_decimal(5, Rounding::down) == "0.33333");
    CHECK(third.to_decimal(5, Rounding::up) == "0.33334");
    const BigFloat neg = -third;
    CHECK(neg.to_decimal(3, Rounding::down) == "-0.334");
    CHECK(neg.to_decimal(3, Rounding::up) == "-0.333");
    CHECK(BigFloat::from_int(12, 64).to_decimal(2, Rounding::up) == "12.00");
    CHECK(BigFloat::from_double(0.1, 64).to_double() == 0.1);
}

TEST_CASE("interval examples", "[interval]") {
    const Interval<double> a(1.0), b(2.0);
    const auto s = a + b;
    CHECK(s.lo() == 3.0);
    CHECK(s.hi() == 3.0);
    CHECK(s.width() == 0.0);

    const auto r = sqrt(Interval<double>(0.0, 4.0));
    CHECK(r.lo() == 0.0);
    CHECK(r.hi() == 2.0);

    const auto t = Interval<double>(1, 2) + Interval<double>(3, 5);
    CHECK(t.lo() == 4.0);
    CHECK(t.hi() == 7.0);

    CHECK_THROWS_AS(Interval<double>(2.0, 1.0), DomainError);
    CHECK_THROWS_AS(sqrt(Interval<double>(-1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(Interval<double>(1, 2) / Interval<double>(-1, 1), DomainError);
}

TEST_CASE("interval operations contain the exact image and never narrow", "[interval][property]") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(0.0, 100.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int i = 0; i < 20000; ++i) {
        const double a0 = pos(rng), a1 = a0 + pos(rng) * 1e-3;
        const double b0 = pos(rng), b1 = b0 + pos(rng) * 1e-3;
        const Interval<double> a(a0, a1), b(b0, b1);
        // an exact point of each operand
        const Rational pa = exact(a0) + (exact(a1) - exact(a0)) * Rational(unit(rng));
        const Rational pb = exact(b0) + (exact(b1) - exact(b0)) * Rational(unit(rng));

        const auto in = [](const Interval<double>& iv, const Rational& x) {
            return exact(iv.lo()) <= x && x <= exact(iv.hi());
        };
        REQUIRE(in(a + b, pa + pb));
        REQUIRE(in(a - b, pa - pb));
        REQUIRE(in(a * b, pa * pb));
        REQUIRE(in(a / b, pa / pb));

        const Rational wa = exact(a1) - exact(a0), wb = exact(b1) - exact(b0);
        REQUIRE(exact((a + b).hi()) - exact((a + b).lo()) >= wa + wb);
        REQUIRE(exact((a - b).hi()) - exact((a - b).lo()) >= wa + wb);
        REQUIRE(exact((a * b).hi()) - exact((a * b).lo()) >= exact(a0) * wb + exact(b0) * wa);

        const auto r = sqrt(a);
        REQUIRE(exact(r.lo()) * exact(r.lo()) <= exact(a0));
        REQUIRE(exact(a1) <= exact(r.hi()) * exact(r.hi()));
    }
}
