#pragma once

// Software binary floating point with a per-value mantissa precision and
// directed rounding on every operation.
//
// A value is mantissa * 2^exponent with |mantissa| holding exactly `bits`
// significant bits (or zero). Field operations are carried out exactly on
// the integer mantissas and then rounded once toward the requested side, so
// results are the correctly rounded directed values.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"
#include "scalar.hpp"

namespace cavex {

class BigFloat {
public:
    using Int = boost::multiprecision::cpp_int;

    static constexpr int min_bits = 8;
    static constexpr int max_bits = 1 << 16;
    static constexpr int default_bits = 128;

    BigFloat() = default;

    /// Exact conversion; `bits` must be large enough to hold `v` or the
    /// value is rounded in direction `dir`.
    static BigFloat from_int(const Int& v, int bits, Rounding dir = Rounding::down) {
        return round(v, 0, checked_bits(bits), dir);
    }

    /// Exact when bits >= 53.
    static BigFloat from_double(double v, int bits, Rounding dir = Rounding::down) {
        if (!std::isfinite(v)) throw DomainError("non-finite double");
        if (v == 0) return zero(bits);
        int e = 0;
        const double frac = std::frexp(v, &e);
        const auto scaled = static_cast<std::int64_t>(std::ldexp(frac, 53));
        return round(Int(scaled), static_cast<std::int64_t>(e) - 53, checked_bits(bits), dir);
    }

    static BigFloat zero(int bits) {
        BigFloat z;
        z.bits_ = checked_bits(bits);
        return z;
    }

    int bits() const noexcept { return bits_; }
    bool is_zero() const noexcept { return mant_ == 0; }
    int sign() const noexcept { return mant_.sign(); }
    const Int& mantissa() const noexcept { return mant_; }
    std::int64_t exponent() const noexcept { return exp_; }

    /// Re-rounds to a different precision.
    BigFloat with_bits(int bits, Rounding dir) const { return round(mant_, exp_, checked_bits(bits), dir); }

    BigFloat operator-() const {
        BigFloat r = *this;
        r.mant_ = -r.mant_;
        return r;
    }

    static BigFloat add(const BigFloat& a, const BigFloat& b, Rounding dir) {
        const int p = std::max(a.bits_, b.bits_);
        if (a.is_zero()) return b.with_bits(p, dir);
        if (b.is_zero()) return a.with_bits(p, dir);

        const BigFloat* big = &a;
        const BigFloat* small = &b;
        if (a.top() < b.top()) std::swap(big, small);

        // When the smaller operand lies entirely below the rounding position
        // of the result only its sign matters; replace it by a sticky value
        // well under half a unit of the larger one.
        const std::int64_t floor_exp = big->top() - p - 3;
        if (small->top() < floor_exp) {
            const Int sticky = small->sign();
            return exact_sum(*big, sticky, floor_exp, p, dir);
        }
        return exact_sum(*big, small->mant_, small->exp_, p, dir);
    }

    static BigFloat sub(const BigFloat& a, const BigFloat& b, Rounding dir) { return add(a, -b, dir); }

    static BigFloat mul(const BigFloat& a, const BigFloat& b, Rounding dir) {
        const int p = std::max(a.bits_, b.bits_);
        return round(a.mant_ * b.mant_, a.exp_ + b.exp_, p, dir);
    }

    static BigFloat div(const BigFloat& a, const BigFloat& b, Rounding dir) {
        const int p = std::max(a.bits_, b.bits_);
        if (b.is_zero()) throw DomainError("division by zero");
        if (a.is_zero()) return zero(p);

        const Int na = abs(a.mant_);
        const Int nb = abs(b.mant_);
        // quotient needs at least p + 2 bits before the sticky bit
        const std::int64_t shift =
            std::max<std::int64_t>(0, static_cast<std::int64_t>(msb(nb)) - static_cast<std::int64_t>(msb(na)) + p + 2);
        const Int num = na << static_cast<unsigned>(shift);
        Int q = num / nb;
        const bool inexact = (num % nb) != 0;
        std::int64_t e = a.exp_ - b.exp_ - shift;
        if (inexact) {
            q = (q << 1) | 1;
            e -= 1;
        }
        if ((a.sign() < 0) != (b.sign() < 0)) q = -q;
        return round(q, e, p, dir);
    }

    /// Newton iteration on the integer mantissa, then one directed rounding.
    static BigFloat sqrt(const BigFloat& a, Rounding dir) {
        const int p = a.bits_;
        if (a.sign() < 0) throw DomainError("sqrt of negative value");
        if (a.is_zero()) return zero(p);

        Int m = a.mant_;
        std::int64_t e = a.exp_;
        if (e % 2 != 0) {
            m <<= 1;
            e -= 1;
        }
        const std::int64_t have = static_cast<std::int64_t>(msb(m)) + 1;
        std::int64_t shift = std::max<std::int64_t>(0, 2 * (p + 2) - have);
        if (shift % 2 != 0) ++shift;
        m <<= static_cast<unsigned>(shift);
        e -= shift;

        Int root = isqrt(m);
        std::int64_t re = e / 2;
        if (root * root != m) {
            root = (root << 1) | 1;
            re -= 1;
        }
        return round(root, re, p, dir);
    }

    /// Integer square root floor(sqrt(n)) by Newton's method.
    static Int isqrt(const Int& n) {
        if (n < 0) throw DomainError("isqrt of negative value");
        if (n < 2) return n;
        const unsigned half = (static_cast<unsigned>(msb(n)) + 2) / 2;
        Int x = Int(1) << half; // >= sqrt(n)
        while (true) {
            Int y = (x + n / x) >> 1;
            if (y >= x) return x;
            x = std::move(y);
        }
    }

    static int compare(const BigFloat& a, const BigFloat& b) {
        const int sa = a.sign();
        const int sb = b.sign();
        if (sa != sb) return sa < sb ? -1 : 1;
        if (sa == 0) return 0;
        const int mag = compare_magnitude(a, b);
        return sa > 0 ? mag : -mag;
    }

    double to_double() const {
        if (is_zero()) return 0.0;
        const Int am = abs(mant_);
        const std::int64_t nb = static_cast<std::int64_t>(msb(am)) + 1;
        const std::int64_t drop = std::max<std::int64_t>(0, nb - 62);
        const auto top_bits = static_cast<std::uint64_t>(am >> static_cast<unsigned>(drop));
        const double v = std::ldexp(static_cast<double>(top_bits), static_cast<int>(exp_ + drop));
        return sign() < 0 ? -v : v;
    }

    /// Fixed-point decimal with `digits` fractional digits, rounded toward `dir`.
    std::string to_decimal(int digits, Rounding dir) const {
        digits = std::max(0, digits);
        Int pow10 = 1;
        for (int i = 0; i < digits; ++i) pow10 *= 10;

        Int scaled;
        if (exp_ >= 0) {
            scaled = (mant_ << static_cast<unsigned>(exp_)) * pow10;
        } else {
            const Int num = mant_ * pow10;
            const unsigned sh = static_cast<unsigned>(-exp_);
            const Int mag = abs(num);
            Int q = mag >> sh;
            const bool inexact = (q << sh) != mag;
            const bool negative = num < 0;
            if (inexact && ((dir == Rounding::up) != negative)) q += 1;
            scaled = negative ? Int(-q) : q;
        }

        const bool negative = scaled < 0;
        std::string s = abs(scaled).str();
        if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
        if (digits > 0) s.insert(s.size() - static_cast<std::size_t>(digits), ".");
        return negative ? "-" + s : s;
    }

private:
    static int checked_bits(int bits) {
        if (bits < min_bits || bits > max_bits) {
            throw DomainError("big-float precision must be in [" + std::to_string(min_bits) + ", " +
                              std::to_string(max_bits) + "] bits");
        }
        return bits;
    }

    static std::size_t msb(const Int& x) { return boost::multiprecision::msb(x); }
    static Int abs(const Int& x) { return x < 0 ? Int(-x) : x; }

    // exponent of the most significant bit
    std::int64_t top() const { return exp_ + static_cast<std::int64_t>(msb(abs(mant_))); }

    static int compare_magnitude(const BigFloat& a, const BigFloat& b) {
        if (a.top() != b.top()) return a.top() < b.top() ? -1 : 1;
        const std::int64_t e = std::min(a.exp_, b.exp_);
        const Int ma = abs(a.mant_) << static_cast<unsigned>(a.exp_ - e);
        const Int mb = abs(b.mant_) << static_cast<unsigned>(b.exp_ - e);
        return ma < mb ? -1 : (ma > mb ? 1 : 0);
    }

    static BigFloat exact_sum(const BigFloat& big, const Int& small_mant, std::int64_t small_exp, int p, Rounding dir) {
        const std::int64_t e = std::min(big.exp_, small_exp);
        const Int sum = (big.mant_ << static_cast<unsigned>(big.exp_ - e)) +
                        (small_mant << static_cast<unsigned>(small_exp - e));
        return round(sum, e, p, dir);
    }

    static BigFloat round(const Int& m, std::int64_t e, int p, Rounding dir) {
        BigFloat r;
        r.bits_ = p;
        if (m == 0) return r;

        const bool negative = m < 0;
        Int mag = abs(m);
        const std::int64_t nb = static_cast<std::int64_t>(msb(mag)) + 1;
        if (nb <= p) {
            const auto sh = static_cast<unsigned>(p - nb);
            r.mant_ = mag << sh;
            r.exp_ = e - sh;
        } else {
            const auto sh = static_cast<unsigned>(nb - p);
            Int q = mag >> sh;
            const bool inexact = (q << sh) != mag;
            std::int64_t ne = e + sh;
            // away from zero when rounding up a positive or down a negative
            if (inexact && ((dir == Rounding::up) != negative)) {
                q += 1;
                if (static_cast<std::int64_t>(msb(q)) + 1 > p) {
                    q >>= 1;
                    ne += 1;
                }
            }
            r.mant_ = std::move(q);
            r.exp_ = ne;
        }
        if (negative) r.mant_ = -r.mant_;
        if (r.exp_ > (std::int64_t{1} << 40) || r.exp_ < -(std::int64_t{1} << 40)) {
            throw OverflowError("big-float exponent out of range");
        }
        return r;
    }

    Int mant_ = 0;
    std::int64_t exp_ = 0;
    int bits_ = default_bits;
};

template <>
struct ScalarTraits<BigFloat> {
    static BigFloat zero(int bits) { return BigFloat::zero(bits); }
    static BigFloat from_int(long long v, const BigFloat& like) { return BigFloat::from_int(v, like.bits()); }
    static BigFloat from_double(double v, int bits, Rounding dir) { return BigFloat::from_double(v, bits, dir); }
    static BigFloat add(const BigFloat& a, const BigFloat& b, Rounding d) { return BigFloat::add(a, b, d); }
    static BigFloat sub(const BigFloat& a, const BigFloat& b, Rounding d) { return BigFloat::sub(a, b, d); }
    static BigFloat mul(const BigFloat& a, const BigFloat& b, Rounding d) { return BigFloat::mul(a, b, d); }
    static BigFloat div(const BigFloat& a, const BigFloat& b, Rounding d) { return BigFloat::div(a, b, d); }
    static BigFloat sqrt(const BigFloat& a, Rounding d) { return BigFloat::sqrt(a, d); }
    static double to_double(const BigFloat& a) { return a.to_double(); }
    static int precision_bits(const BigFloat& a) { return a.bits(); }
    static bool is_zero(const BigFloat& a) { return a.is_zero(); }
    static int compare(const BigFloat& a, const BigFloat& b) { return BigFloat::compare(a, b); }
};

} // namespace cavex
