#pragma once

// Dense univariate polynomials over F_p, coefficients stored low degree first.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "arith.hpp"

namespace ltavg {

using PolyZ = std::vector<i64>; ///< integer polynomial, low degree first
using PolyP = std::vector<u64>; ///< polynomial over F_p, low degree first, trimmed

namespace polymod {

inline void trim(PolyP& f)
{
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline int degree(const PolyP& f) { return static_cast<int>(f.size()) - 1; }

inline PolyP reduce(const PolyZ& f, u64 p)
{
    PolyP out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = mod_floor(f[i], p);
    trim(out);
    return out;
}

inline u64 eval(const PolyP& f, u64 x, u64 p)
{
    u64 acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = (mulmod(acc, x, p) + f[i]) % p;
    return acc;
}

inline PolyP add(const PolyP& a, const PolyP& b, u64 p)
{
    PolyP out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = (out[i] + b[i]) % p;
    trim(out);
    return out;
}

inline PolyP sub(const PolyP& a, const PolyP& b, u64 p)
{
    PolyP out(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = (out[i] + p - b[i]) % p;
    trim(out);
    return out;
}

inline PolyP mul(const PolyP& a, const PolyP& b, u64 p)
{
    if (a.empty() || b.empty()) return {};
    PolyP out(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = (out[i + j] + mulmod(a[i], b[j], p)) % p;
    }
    trim(out);
    return out;
}

/// Quotient and remainder of a by nonzero b.
inline std::pair<PolyP, PolyP> divmod(PolyP a, const PolyP& b, u64 p)
{
    if (b.empty()) throw domain_error("polymod::divmod: division by zero polynomial");
    trim(a);
    if (a.size() < b.size()) return {{}, a};
    const u64 lead_inv = invmod(b.back(), p);
    PolyP q(a.size() - b.size() + 1, 0);
    for (std::size_t i = a.size() - 1;; --i) {
        const u64 c = mulmod(a[i], lead_inv, p);
        const std::size_t shift = i - (b.size() - 1);
        q[shift] = c;
        if (c != 0) {
            for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = (a[shift + j] + p - mulmod(c, b[j], p)) % p;
        }
        if (i == b.size() - 1) break;
    }
    a.resize(b.size() - 1);
    trim(a);
    trim(q);
    return {q, a};
}

inline PolyP mod(const PolyP& a, const PolyP& m, u64 p) { return divmod(a, m, p).second; }

inline PolyP make_monic(PolyP f, u64 p)
{
    if (f.empty()) return f;
    const u64 inv = invmod(f.back(), p);
    for (auto& c : f) c = mulmod(c, inv, p);
    return f;
}

inline PolyP gcd(PolyP a, PolyP b, u64 p)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        PolyP r = mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a, p);
}

inline PolyP mulmod_poly(const PolyP& a, const PolyP& b, const PolyP& m, u64 p) { return mod(mul(a, b, p), m, p); }

inline PolyP powmod_poly(PolyP base, u64 exp, const PolyP& m, u64 p)
{
    PolyP result{1 % p};
    trim(result);
    base = mod(base, m, p);
    while (exp) {
        if (exp & 1) result = mulmod_poly(result, base, m, p);
        base = mulmod_poly(base, base, m, p);
        exp >>= 1;
    }
    return result;
}

/// x^(p^k) mod m via repeated Frobenius.
inline PolyP frobenius_power(const PolyP& m, u64 p, int k)
{
    PolyP x = mod(PolyP{0, 1}, m, p);
    for (int i = 0; i < k; ++i) x = powmod_poly(x, p, m, p);
    return x;
}

/// Splits a squarefree monic f whose irreducible factors all have degree d.
inline void equal_degree_split(const PolyP& f, int d, u64 p, std::mt19937_64& rng, std::vector<PolyP>& out)
{
    const int n = degree(f);
    if (n <= d) {
        out.push_back(f);
        return;
    }
    std::uniform_int_distribution<u64> coeff(0, p - 1);
    while (true) {
        PolyP a(static_cast<std::size_t>(n));
        for (auto& c : a) c = coeff(rng);
        trim(a);
        if (degree(a) < 1) continue;
        PolyP w;
        if (p == 2) {
            // absolute trace map a + a^2 + ... + a^(2^(d-1))
            PolyP term = mod(a, f, p);
            w = term;
            for (int i = 1; i < d; ++i) {
                term = mulmod_poly(term, term, f, p);
                w = add(w, term, p);
            }
        } else {
            u64 q = 1;
            for (int i = 0; i < d; ++i) q *= p;
            w = sub(powmod_poly(a, (q - 1) / 2, f, p), PolyP{1}, p);
        }
        PolyP g = gcd(f, w, p);
        if (degree(g) > 0 && degree(g) < n) {
            equal_degree_split(g, d, p, rng, out);
            equal_degree_split(divmod(f, g, p).first, d, p, rng, out);
            return;
        }
    }
}

/// Distinct-degree factorization of a squarefree monic f: (degree, product of factors of that degree).
inline std::vector<std::pair<int, PolyP>> distinct_degree_factor(PolyP f, u64 p)
{
    std::vector<std::pair<int, PolyP>> out;
    f = make_monic(f, p);
    PolyP xpow = PolyP{0, 1};
    for (int d = 1; 2 * d <= degree(f); ++d) {
        xpow = powmod_poly(xpow, p, f, p);
        PolyP g = gcd(f, sub(xpow, PolyP{0, 1}, p), p);
        if (degree(g) > 0) {
            out.emplace_back(d, g);
            f = divmod(f, g, p).first;
            xpow = mod(xpow, f, p);
        }
    }
    if (degree(f) > 0) out.emplace_back(degree(f), f);
    return out;
}

/// Complete factorization of a squarefree polynomial into monic irreducibles, sorted
/// by (degree, coefficients) so the output is independent of the random splitting path.
inline std::vector<PolyP> factor_squarefree(const PolyP& f, u64 p)
{
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ p);
    std::vector<PolyP> out;
    for (const auto& [d, g] : distinct_degree_factor(f, p)) equal_degree_split(g, d, p, rng, out);
    std::sort(out.begin(), out.end(), [](const PolyP& a, const PolyP& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
    });
    return out;
}

inline bool is_squarefree(const PolyP& f, u64 p)
{
    PolyP df;
    for (std::size_t i = 1; i < f.size(); ++i) df.push_back(mulmod(f[i], i % p, p));
    trim(df);
    if (df.empty()) return degree(f) <= 0;
    return degree(gcd(f, df, p)) == 0;
}

/// Distinct roots in [0, p), ascending.
inline std::vector<u64> roots(const PolyP& f_in, u64 p)
{
    PolyP f = f_in;
    trim(f);
    std::vector<u64> out;
    if (f.empty()) {
        for (u64 x = 0; x < p; ++x) out.push_back(x);
        return out;
    }
    if (degree(f) == 0) return out;
    if (p < 64) {
        for (u64 x = 0; x < p; ++x)
            if (eval(f, x, p) == 0) out.push_back(x);
        return out;
    }
    f = make_monic(f, p);
    PolyP xp = powmod_poly(PolyP{0, 1}, p, f, p);
    PolyP split = gcd(f, sub(xp, PolyP{0, 1}, p), p);
    if (degree(split) <= 0) return out;
    std::mt19937_64 rng(0x51ed270b27f0a1c3ULL ^ p);
    std::vector<PolyP> linear;
    equal_degree_split(split, 1, p, rng, linear);
    for (const auto& l : linear) out.push_back((p - l[0] % p) % p);
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of distinct roots in F_p, without extracting them.
inline int count_roots(const PolyP& f_in, u64 p)
{
    PolyP f = f_in;
    trim(f);
    if (degree(f) <= 0) return 0;
    f = make_monic(f, p);
    PolyP xp = powmod_poly(PolyP{0, 1}, p, f, p);
    return degree(gcd(f, sub(xp, PolyP{0, 1}, p), p));
}

} // namespace polymod
} // namespace ltavg
