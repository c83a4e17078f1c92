#pragma once

// Short Weierstrass curves y^2 = x^3 + a x + b over residue fields F_q, q = p^f, p > 3.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "arith.hpp"
#include "finite_field.hpp"
#include "memo_cache.hpp"
#include "rational.hpp"

namespace ltavg {

/// Weierstrass coefficients in power-basis coordinates over the field's integer lattice.
struct CurveModel {
    std::vector<i64> alpha;
    std::vector<i64> beta;
};

struct ReducedCurve {
    FiniteField field;
    FiniteField::Elem a = 0;
    FiniteField::Elem b = 0;

    u64 p() const { return field.characteristic(); }
    int f() const { return field.degree(); }
};

inline bool is_singular(const FiniteField& F, FiniteField::Elem a, FiniteField::Elem b)
{
    const auto a3 = F.mul(F.mul(a, a), a);
    const auto b2 = F.mul(b, b);
    return F.add(F.mul(F.from_int(4), a3), F.mul(F.from_int(27), b2)) == 0;
}

inline bool is_singular_mod_p(u64 a, u64 b, u64 p)
{
    const u64 a3 = mulmod(mulmod(a, a, p), a, p);
    return (mulmod(4 % p, a3, p) + mulmod(27 % p, mulmod(b, b, p), p)) % p == 0;
}

/// Point-count engine for one residue field. Holds the quadratic-character table and
/// the cubes x^3, so each trace costs O(q) table lookups.
class TraceCounter {
public:
    explicit TraceCounter(FiniteField field) : field_(std::move(field)), chi_(field_)
    {
        if (field_.characteristic() <= 3) throw domain_error("TraceCounter: characteristic must exceed 3");
        const u64 q = field_.size();
        if (field_.degree() == 1) {
            const u64 p = field_.characteristic();
            cubes_.resize(p);
            for (u64 x = 0; x < p; ++x) cubes_[x] = mulmod(mulmod(x, x, p), x, p);
        } else {
            cubes_.resize(q);
            for (u64 x = 0; x < q; ++x) cubes_[x] = field_.mul(field_.mul(x, x), x);
        }
    }

    const FiniteField& field() const { return field_; }
    const CharacterTable& character() const { return chi_; }

    /// q + 1 - #E(F_q) = -sum_x chi(x^3 + a x + b). Caller guarantees nonsingularity.
    i64 trace_unchecked(FiniteField::Elem a, FiniteField::Elem b) const
    {
        const auto& chi = chi_.values();
        i64 s = 0;
        if (field_.degree() == 1) {
            const u64 p = field_.characteristic();
            u64 ax = 0; // a*x mod p, advanced incrementally
            for (u64 x = 0; x < p; ++x) {
                u64 v = cubes_[x] + ax + b;
                v %= p;
                s += chi[v];
                ax += a;
                if (ax >= p) ax -= p;
            }
        } else {
            const u64 q = field_.size();
            for (u64 x = 0; x < q; ++x) s += chi[field_.add(field_.add(cubes_[x], field_.mul(a, x)), b)];
        }
        return -s;
    }

    i64 trace(FiniteField::Elem a, FiniteField::Elem b) const
    {
        if (is_singular(field_, a, b)) throw domain_error("singular curve: 4a^3 + 27b^2 = 0");
        return trace_unchecked(a, b);
    }

private:
    FiniteField field_;
    CharacterTable chi_;
    std::vector<FiniteField::Elem> cubes_;
};

namespace detail {

struct TraceKey {
    u64 p, a, b;
    friend bool operator==(const TraceKey&, const TraceKey&) = default;
};

struct TraceKeyHash {
    std::size_t operator()(const TraceKey& k) const noexcept
    {
        u64 h = k.p * 0x9e3779b97f4a7c15ULL;
        h ^= k.a + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
        h ^= k.b + 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

using TraceCache = MemoCache<detail::TraceKey, i64, detail::TraceKeyHash>;

inline TraceCache& trace_cache()
{
    static TraceCache cache;
    return cache;
}

inline void require_char_above_3(u64 p)
{
    if (p <= 3 || !is_prime(p)) throw domain_error("need a prime p > 3, got " + std::to_string(p));
}

/// Trace of Frobenius a_p = p + 1 - #E(F_p) for E: y^2 = x^3 + a x + b, memoized on (p, a mod p, b mod p).
inline i64 trace_mod_p(i64 a, i64 b, u64 p)
{
    require_char_above_3(p);
    const u64 ar = mod_floor(a, p), br = mod_floor(b, p);
    if (is_singular_mod_p(ar, br, p)) throw domain_error("singular curve: 4a^3 + 27b^2 = 0 mod p");
    return trace_cache().get_or_compute({p, ar, br}, [&] {
        i64 s = 0;
        for (u64 x = 0; x < p; ++x) {
            const u64 v = (mulmod(mulmod(x, x, p), x, p) + mulmod(ar, x, p) + br) % p;
            if (v == 0) continue;
            s += powmod(v, (p - 1) / 2, p) == 1 ? 1 : -1;
        }
        return -s;
    });
}

/// Trace over F_q, q = p^f, using Euler's criterion in F_q for the character.
inline i64 trace_mod_q(const ReducedCurve& curve)
{
    const auto& F = curve.field;
    require_char_above_3(F.characteristic());
    if (F.degree() == 1) return trace_mod_p(static_cast<i64>(curve.a), static_cast<i64>(curve.b), F.characteristic());
    if (is_singular(F, curve.a, curve.b)) throw domain_error("singular curve over F_q");
    i64 s = 0;
    for (u64 x = 0; x < F.size(); ++x) {
        const auto v = F.add(F.add(F.mul(F.mul(x, x), x), F.mul(curve.a, x)), curve.b);
        s += F.quadratic_character(v);
    }
    return -s;
}

/// #Aut of y^2 = x^3 + a x + b over F_p (p > 3).
inline int aut_size(i64 a, i64 b, u64 p)
{
    require_char_above_3(p);
    const u64 ar = mod_floor(a, p), br = mod_floor(b, p);
    if (ar == 0 && br == 0) throw domain_error("aut_size: (a, b) = (0, 0)");
    if (ar != 0 && br != 0) return 2;
    if (br == 0) return static_cast<int>(std::gcd<u64>(4, p - 1));
    return static_cast<int>(std::gcd<u64>(6, p - 1));
}

/// True iff a = u^4 a2 and b = u^6 b2 for some u in F_p^*.
inline bool models_isomorphic(i64 a, i64 b, i64 a2, i64 b2, u64 p)
{
    require_char_above_3(p);
    const u64 x = mod_floor(a, p), y = mod_floor(b, p), x2 = mod_floor(a2, p), y2 = mod_floor(b2, p);
    for (u64 u = 1; u < p; ++u) {
        const u64 u2 = mulmod(u, u, p);
        const u64 u4 = mulmod(u2, u2, p);
        if (x == mulmod(u4, x2, p) && y == mulmod(mulmod(u4, u2, p), y2, p)) return true;
    }
    return false;
}

/// The F_p-isomorphism orbit {(u^4 a, u^6 b) : u in F_p^*} of a model, as distinct pairs.
inline std::vector<std::pair<u64, u64>> isomorphism_orbit(u64 a, u64 b, u64 p)
{
    std::vector<std::pair<u64, u64>> orbit;
    orbit.reserve(p - 1);
    for (u64 u = 1; u < p; ++u) {
        const u64 u2 = mulmod(u, u, p);
        const u64 u4 = mulmod(u2, u2, p);
        orbit.emplace_back(mulmod(u4, a, p), mulmod(mulmod(u4, u2, p), b, p));
    }
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    return orbit;
}

/// Counts of nonsingular models (a, b) in F_p^2 by trace, plus the singular count.
struct TraceHistogram {
    u64 p;
    std::map<i64, u64> by_trace;
    u64 singular = 0;
};

inline TraceHistogram trace_histogram(u64 p)
{
    require_char_above_3(p);
    TraceCounter counter{FiniteField(p)};
    TraceHistogram hist{p, {}, 0};
    for (u64 a = 0; a < p; ++a) {
        for (u64 b = 0; b < p; ++b) {
            if (is_singular_mod_p(a, b, p)) {
                ++hist.singular;
                continue;
            }
            ++hist.by_trace[counter.trace_unchecked(a, b)];
        }
    }
    return hist;
}

/// Sum over F_p-isomorphism classes with trace r of 1/#Aut, by brute force over all
/// models: every class of curves with #Aut = A contains exactly (p-1)/A models.
inline Rational isogeny_mass_oracle(u64 p, i64 r)
{
    require_char_above_3(p);
    if (static_cast<i128>(r) * r >= static_cast<i128>(4) * static_cast<i128>(p))
        throw domain_error("isogeny_mass_oracle: need r^2 < 4p");
    static MemoCache<u64, TraceHistogram> histograms;
    const auto hist = histograms.get_or_compute(p, [p] { return trace_histogram(p); });
    const auto it = hist.by_trace.find(r);
    const i64 models = it == hist.by_trace.end() ? 0 : static_cast<i64>(it->second);
    return Rational(models, static_cast<i64>(p - 1));
}

} // namespace ltavg
