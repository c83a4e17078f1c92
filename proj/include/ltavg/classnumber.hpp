#pragma once

// Class numbers of imaginary quadratic orders, Hurwitz-Kronecker class numbers, and
// L(1, chi_d) by the class number formula and by direct summation.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "arith.hpp"
#include "memo_cache.hpp"
#include "rational.hpp"

namespace ltavg {

/// Kronecker symbol (a/n) for n >= 0.
inline int kronecker(i64 a, u64 n)
{
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    int result = 1;
    int twos = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++twos;
    }
    if (twos > 0) {
        if ((a & 1) == 0) return 0;
        const u64 a8 = mod_floor(a, 8);
        if ((twos & 1) && (a8 == 3 || a8 == 5)) result = -result;
    }
    // Jacobi symbol (a/n) for odd n
    u64 x = mod_floor(a, n);
    u64 y = n;
    while (x != 0) {
        while ((x & 1) == 0) {
            x >>= 1;
            const u64 y8 = y & 7;
            if (y8 == 3 || y8 == 5) result = -result;
        }
        std::swap(x, y);
        if ((x & 3) == 3 && (y & 3) == 3) result = -result;
        x %= y;
    }
    return y == 1 ? result : 0;
}

inline bool is_discriminant(i64 d) { return mod_floor(d, 4) == 0 || mod_floor(d, 4) == 1; }

inline void require_negative_discriminant(i64 d)
{
    if (d >= 0 || !is_discriminant(d))
        throw domain_error("not a negative discriminant (need d < 0, d = 0,1 mod 4): " + std::to_string(d));
}

/// Fundamental discriminant test for d < 0.
inline bool is_fundamental(i64 d)
{
    if (d >= 0 || !is_discriminant(d)) return false;
    const u64 m = static_cast<u64>(-d);
    if (mod_floor(d, 4) == 1) {
        for (const auto& [p, e] : factorize(m))
            if (e > 1) return false;
        return true;
    }
    const i64 d4 = d / 4;
    if (mod_floor(d4, 4) != 2 && mod_floor(d4, 4) != 3) return false;
    for (const auto& [p, e] : factorize(m / 4))
        if (e > 1) return false;
    return true;
}

namespace detail {

inline i64 gcd3(i64 a, i64 b, i64 c) { return std::gcd(std::gcd(a, b < 0 ? -b : b), c); }

inline i64 count_primitive_reduced_forms(i64 d)
{
    const i64 n = -d;
    i64 count = 0;
    for (i64 a = 1; 3 * a * a <= n; ++a) {
        // b = d mod 2, -a < b <= a
        for (i64 b = -a + 1; b <= a; ++b) {
            if (((b - d) & 1) != 0) continue;
            const i64 num = b * b - d;
            if (num % (4 * a) != 0) continue;
            const i64 c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && (a == c)) continue; // -|b| with a == c is the mirror of +|b|
            if (gcd3(a, b, c) != 1) continue;
            ++count;
        }
    }
    return count;
}

inline MemoCache<i64, i64>& h_cache()
{
    static MemoCache<i64, i64> cache;
    return cache;
}

inline MemoCache<i64, Rational>& hurwitz_cache()
{
    static MemoCache<i64, Rational> cache;
    return cache;
}

} // namespace detail

/// Number of primitive reduced forms (a, b, c) of discriminant d < 0: the class number
/// of the imaginary quadratic order of discriminant d.
inline i64 class_number_h(i64 d)
{
    require_negative_discriminant(d);
    return detail::h_cache().get_or_compute(d, [d] { return detail::count_primitive_reduced_forms(d); });
}

/// Size of the unit group of the order of discriminant d.
inline int unit_count_w(i64 d)
{
    require_negative_discriminant(d);
    if (d == -3) return 6;
    if (d == -4) return 4;
    return 2;
}

/// Hurwitz-Kronecker class number H(D) = 2 * sum over k^2 | D with D/k^2 a discriminant
/// of h(D/k^2)/w(D/k^2). Normalized so that H(-3) = 1/3 and H(-4) = 1/2.
inline Rational hurwitz_H(i64 D)
{
    require_negative_discriminant(D);
    return detail::hurwitz_cache().get_or_compute(D, [D] {
        Rational total;
        const i64 n = -D;
        for (i64 k = 1; k * k <= n; ++k) {
            if (n % (k * k) != 0) continue;
            const i64 d = D / (k * k);
            if (!is_discriminant(d)) continue;
            total += Rational(class_number_h(d), unit_count_w(d));
        }
        return total * Rational(2);
    });
}

/// L(1, chi_d) = 2 pi h(d) / (w(d) sqrt|d|).
inline double L1_formula(i64 d)
{
    require_negative_discriminant(d);
    const auto h = static_cast<double>(class_number_h(d));
    const auto w = static_cast<double>(unit_count_w(d));
    return 2.0 * std::numbers::pi * h / (w * std::sqrt(static_cast<double>(-d)));
}

struct SeriesResult {
    double value;
    u64 terms;            ///< number of terms summed
    double tail_bound;    ///< rigorous bound on |L - value| from partial summation
};

/// L(1, chi_d) by summing (d/n)/n directly. chi_d has period |d| and zero sum over a
/// period, so partial character sums are bounded by their maximum S over one period
/// and Abel summation bounds the tail after N terms by 2S/(N+1). N is chosen so that
/// this bound is at most eps/2.
inline SeriesResult L1_series_detail(i64 d, double eps)
{
    if (!is_discriminant(d) || d == 0) throw domain_error("L1_series: not a discriminant: " + std::to_string(d));
    if (!(eps > 0.0 && eps < 1.0)) throw domain_error("L1_series: eps must lie in (0, 1)");
    if (d > 0 && isqrt(static_cast<u64>(d)) * isqrt(static_cast<u64>(d)) == static_cast<u64>(d))
        throw domain_error("L1_series: principal character (square discriminant)");
    const u64 period = static_cast<u64>(d < 0 ? -d : d);
    std::vector<std::int8_t> chi(period);
    long max_partial = 0, partial = 0;
    for (u64 n = 0; n < period; ++n) chi[n] = static_cast<std::int8_t>(kronecker(d, n));
    for (u64 n = 1; n <= period; ++n) {
        partial += chi[n % period];
        max_partial = std::max(max_partial, partial < 0 ? -partial : partial);
    }
    const auto N = static_cast<u64>(std::ceil(4.0 * static_cast<double>(max_partial) / eps));
    // Accumulate one period at a time in long double; per-period blocks are small.
    long double total = 0.0L;
    u64 n = 1;
    while (n <= N) {
        long double block = 0.0L;
        const u64 end = std::min(N, n + period - 1);
        u64 r = n % period;
        for (; n <= end; ++n) {
            if (chi[r] != 0) block += static_cast<long double>(chi[r]) / static_cast<long double>(n);
            if (++r == period) r = 0;
        }
        total += block;
    }
    return {static_cast<double>(total), N, 2.0 * static_cast<double>(max_partial) / static_cast<double>(N + 1)};
}

inline double L1_series(i64 d, double eps) { return L1_series_detail(d, eps).value; }

} // namespace ltavg
