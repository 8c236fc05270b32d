#pragma once

#include <algorithm>
#include <ostream>

#include "errors.hpp"
#include "scalar.hpp"

namespace cavex {

/// Closed interval [lo, hi] with outward-rounded arithmetic. The exact result
/// of every operation on members of the operands is a member of the result.
template <class T>
class Interval {
public:
    using Traits = ScalarTraits<T>;

    Interval() = default;
    explicit Interval(T point) : lo_(point), hi_(point) {}
    Interval(T lo, T hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (Traits::compare(lo_, hi_) > 0) throw DomainError("interval with lo > hi");
    }

    const T& lo() const noexcept { return lo_; }
    const T& hi() const noexcept { return hi_; }

    T width(Rounding dir = Rounding::up) const { return Traits::sub(hi_, lo_, dir); }

    /// Upper bound of the midpoint is not needed anywhere; this one rounds down.
    T mid() const {
        const T two = Traits::from_int(2, lo_);
        return Traits::div(Traits::add(lo_, hi_, Rounding::down), two, Rounding::down);
    }

    bool contains(const T& x) const { return Traits::compare(lo_, x) <= 0 && Traits::compare(x, hi_) <= 0; }

    /// `other` lies inside this interval.
    bool contains(const Interval& other) const {
        return Traits::compare(lo_, other.lo_) <= 0 && Traits::compare(other.hi_, hi_) <= 0;
    }

    bool intersects(const Interval& other) const {
        return Traits::compare(lo_, other.hi_) <= 0 && Traits::compare(other.lo_, hi_) <= 0;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return {Traits::add(a.lo_, b.lo_, Rounding::down), Traits::add(a.hi_, b.hi_, Rounding::up)};
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        return {Traits::sub(a.lo_, b.hi_, Rounding::down), Traits::sub(a.hi_, b.lo_, Rounding::up)};
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        auto lo = [](const T& x, const T& y) { return Traits::mul(x, y, Rounding::down); };
        auto hi = [](const T& x, const T& y) { return Traits::mul(x, y, Rounding::up); };
        T l = std::min({lo(a.lo_, b.lo_), lo(a.lo_, b.hi_), lo(a.hi_, b.lo_), lo(a.hi_, b.hi_)}, less);
        T h = std::max({hi(a.lo_, b.lo_), hi(a.lo_, b.hi_), hi(a.hi_, b.lo_), hi(a.hi_, b.hi_)}, less);
        return {std::move(l), std::move(h)};
    }

    /// Division by an interval that excludes zero.
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (Traits::compare(b.lo_, Traits::from_int(0, b.lo_)) <= 0 &&
            Traits::compare(b.hi_, Traits::from_int(0, b.hi_)) >= 0) {
            throw DomainError("interval division by an interval containing zero");
        }
        auto lo = [](const T& x, const T& y) { return Traits::div(x, y, Rounding::down); };
        auto hi = [](const T& x, const T& y) { return Traits::div(x, y, Rounding::up); };
        T l = std::min({lo(a.lo_, b.lo_), lo(a.lo_, b.hi_), lo(a.hi_, b.lo_), lo(a.hi_, b.hi_)}, less);
        T h = std::max({hi(a.lo_, b.lo_), hi(a.lo_, b.hi_), hi(a.hi_, b.lo_), hi(a.hi_, b.hi_)}, less);
        return {std::move(l), std::move(h)};
    }

    /// Scaling by a non-negative exact factor.
    Interval scaled(const T& factor) const {
        if (Traits::compare(factor, Traits::from_int(0, factor)) < 0) throw DomainError("negative scale factor");
        return {Traits::mul(lo_, factor, Rounding::down), Traits::mul(hi_, factor, Rounding::up)};
    }

    friend Interval sqrt(const Interval& a) {
        if (Traits::compare(a.lo_, Traits::from_int(0, a.lo_)) < 0) throw DomainError("sqrt of interval with lo < 0");
        return {Traits::sqrt(a.lo_, Rounding::down), Traits::sqrt(a.hi_, Rounding::up)};
    }

    /// Square of a non-negative interval.
    Interval squared() const {
        if (Traits::compare(lo_, Traits::from_int(0, lo_)) < 0) throw DomainError("squared() requires lo >= 0");
        return {Traits::mul(lo_, lo_, Rounding::down), Traits::mul(hi_, hi_, Rounding::up)};
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& iv) {
        return os << '[' << Traits::to_double(iv.lo_) << ", " << Traits::to_double(iv.hi_) << ']';
    }

private:
    static bool less(const T& a, const T& b) { return Traits::compare(a, b) < 0; }

    T lo_{};
    T hi_{};
};

} // namespace cavex
