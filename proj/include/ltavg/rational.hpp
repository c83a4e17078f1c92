#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "arith.hpp"

namespace ltavg {

/// Exact rational with 64-bit numerator and positive denominator, always reduced.
/// Intermediate products go through 128 bits; overflow of the reduced result throws.
class Rational {
public:
    constexpr Rational() = default;
    Rational(i64 num) : num_(num), den_(1) {} // NOLINT(google-explicit-constructor)
    Rational(i64 num, i64 den) { assign(num, den); }

    i64 num() const { return num_; }
    i64 den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_long_double() const { return static_cast<long double>(num_) / den_; }

    friend Rational operator+(const Rational& a, const Rational& b)
    {
        const i64 g = std::gcd(a.den_, b.den_);
        const i128 n = static_cast<i128>(a.num_) * (b.den_ / g) + static_cast<i128>(b.num_) * (a.den_ / g);
        const i128 d = static_cast<i128>(a.den_) * (b.den_ / g);
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a) { return Rational::raw(-a.num_, a.den_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b)
    {
        return from_wide(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b)
    {
        if (b.num_ == 0) throw domain_error("Rational: division by zero");
        return from_wide(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        return static_cast<i128>(a.num_) * b.den_ <=> static_cast<i128>(b.num_) * a.den_;
    }

    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static Rational raw(i64 n, i64 d)
    {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        return r;
    }

    static i128 gcd128(i128 a, i128 b)
    {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) a = std::exchange(b, a % b);
        return a;
    }

    static Rational from_wide(i128 n, i128 d)
    {
        if (d == 0) throw domain_error("Rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const i128 g = gcd128(n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        constexpr i128 lim = static_cast<i128>(INT64_MAX);
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rational: 64-bit overflow");
        return raw(static_cast<i64>(n), static_cast<i64>(d));
    }

    void assign(i64 n, i64 d) { *this = from_wide(n, d); }

    i64 num_ = 0;
    i64 den_ = 1;
};

} // namespace ltavg
