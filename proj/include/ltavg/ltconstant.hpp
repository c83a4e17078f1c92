#pragma once

// The average Lang-Trotter constant c_{K,r,1}: the triple-sum form over (b, k, n) and
// the Euler-product form with its finite correction factor at primes dividing 2 m_K.

#include <array>
#include <deque>
#include <limits>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "arith.hpp"
#include "classnumber.hpp"
#include "memo_cache.hpp"
#include "numberfield.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "summation.hpp"

namespace ltavg {

/// c_k^{r,b,m}(n) straight from its definition: the sum of (a/n) over a mod 4n with
/// a = 0,1 mod 4, gcd(r^2 - a k^2, 4 n k^2) = 4 and 4b = r^2 - a k^2 mod gcd(4m, 4nk^2).
inline i64 c_coefficient(u64 k, u64 n, i64 r, i64 b, u64 m)
{
    if (k == 0 || n == 0 || m == 0) throw domain_error("c_coefficient: k, n, m must be positive");
    if (std::gcd(static_cast<u64>(b < 0 ? -b : b), m) != 1) throw domain_error("c_coefficient: gcd(b, m) != 1");
    const i128 k2 = static_cast<i128>(k) * k;
    const i128 modulus = 4 * static_cast<i128>(n) * k2;
    const i128 g = std::gcd(static_cast<i64>(4 * m), static_cast<i64>(modulus));
    i64 total = 0;
    for (u64 a = 0; a < 4 * n; ++a) {
        if (a % 4 > 1) continue;
        const i128 x = static_cast<i128>(r) * r - static_cast<i128>(a) * k2;
        i128 xm = x % modulus;
        if (xm < 0) xm = -xm;
        if (std::gcd(static_cast<i64>(xm), static_cast<i64>(modulus)) != 4) continue;
        i128 diff = (4 * static_cast<i128>(b) - x) % g;
        if (diff != 0) continue;
        total += kronecker(static_cast<i64>(a), n);
    }
    return total;
}

/// Factorized evaluation of c_k^{r,b,m}(n). By the Chinese remainder theorem the sum
/// over a mod 4n splits into local sums at 2 and at each odd prime l | nk; the
/// substitution a -> a u^2 (u the l-free part of k) removes the dependence on u, so
/// each local sum depends only on (l, ord_l n, ord_l k) and is memoized on that key.
class CoefficientEngine {
public:
    CoefficientEngine(i64 r, i64 b, u64 m) : r_(r), b_(b), m_(m)
    {
        if (std::gcd(static_cast<u64>(b < 0 ? -b : b), m) != 1) throw domain_error("CoefficientEngine: gcd(b, m) != 1");
    }

    i64 local(u64 ell, int e, int v) const
    {
        const u64 key = (ell << 16) | (static_cast<u64>(e) << 8) | static_cast<u64>(v);
        return memo_.get_or_compute(key, [&] { return compute_local(ell, e, v); });
    }

    /// Local data for one prime: ord in n, ord in k.
    struct Local {
        u64 ell;
        int e;
        int v;
    };

    i64 coefficient(std::span<const Local> locals) const
    {
        i64 c = 1;
        for (const auto& l : locals) {
            c *= local(l.ell, l.e, l.v);
            if (c == 0) return 0;
        }
        return c;
    }

    i64 coefficient(u64 k, u64 n) const
    {
        std::vector<Local> locals;
        merge_factorizations(factorize(k), factorize(n), locals);
        return coefficient(locals);
    }

    /// Merges factorizations of k and n into per-prime (e, v), always including l = 2.
    static void merge_factorizations(const std::vector<PrimePower>& fk, const std::vector<PrimePower>& fn,
                                     std::vector<Local>& out)
    {
        out.clear();
        std::size_t i = 0, j = 0;
        bool seen_two = false;
        while (i < fk.size() || j < fn.size()) {
            u64 pk = i < fk.size() ? fk[i].prime : UINT64_MAX;
            u64 pn = j < fn.size() ? fn[j].prime : UINT64_MAX;
            Local l{std::min(pk, pn), 0, 0};
            if (pk == l.ell) l.v = fk[i++].exponent;
            if (pn == l.ell) l.e = fn[j++].exponent;
            if (l.ell == 2) seen_two = true;
            out.push_back(l);
        }
        if (!seen_two) out.insert(out.begin(), Local{2, 0, 0});
    }

private:
    i64 compute_local(u64 ell, int e, int v) const
    {
        const int vm = valuation(static_cast<i64>(m_), ell);
        const i64 r2 = r_ * r_;
        const i64 shift = ipow(static_cast<i64>(ell), 2 * v); // l^(2v)
        i64 total = 0;
        if (ell == 2) {
            const int top = e + 2 + 2 * v;                 // ord_2(4 n k^2)
            const int j = std::min(vm + 2, top);           // ord_2 gcd(4m, 4nk^2)
            const i64 count = ipow(2, e + 2);
            const i64 modj = ipow(2, j);
            for (i64 a = 0; a < count; ++a) {
                if ((a & 3) > 1) continue;
                const i64 x = r2 - a * shift;
                if (std::min(valuation(x, 2), top) != 2) continue;
                if (((4 * b_ - x) % modj) != 0) continue;
                total += e == 0 ? 1 : ipow(kronecker(a, 2), e);
            }
            return total;
        }
        const int j = std::min(vm, e + 2 * v);
        const i64 count = ipow(static_cast<i64>(ell), e);
        const i64 modj = ipow(static_cast<i64>(ell), j);
        const bool coprimality = e > 0 || v > 0;
        for (i64 a = 0; a < count; ++a) {
            const i64 x = r2 - a * shift;
            if (coprimality && x % static_cast<i64>(ell) == 0) continue;
            if (((4 * b_ - x) % modj) != 0) continue;
            total += e == 0 ? 1 : ipow(kronecker(a, ell), e);
        }
        return total;
    }

    i64 r_;
    i64 b_;
    u64 m_;
    mutable MemoCache<u64, i64> memo_;
};

/// Which 2-adic table F2_local evaluates. `literal` is the 14-row case table as stated:
/// it is partial (no row covers r = 2 mod 4, ord_2(m) > ord_2(D) even, D/2^ord_2(D) = 7 mod 8).
/// `corrected` replaces the row-4 value and adds row 15, both matched against the
/// 2-adic Euler factor of the sum form (see tests/test_ltconstant.cpp).
enum class F2Table { literal, corrected };

inline const char* to_string(F2Table t) { return t == F2Table::literal ? "literal" : "corrected"; }

inline F2Table parse_f2_table(const std::string& s)
{
    if (s == "literal") return F2Table::literal;
    if (s == "corrected") return F2Table::corrected;
    throw std::invalid_argument("unknown F2 table \"" + s + "\" (literal|corrected)");
}

enum class ConstantMethod { sum, product };

inline const char* to_string(ConstantMethod m) { return m == ConstantMethod::sum ? "sum" : "product"; }

struct ConstantEstimate {
    double value = 0.0;
    ConstantMethod method = ConstantMethod::product;
    u64 K_max = 0;
    u64 N_max = 0;
    u64 L_max = 0;
    double tail_estimate = 0.0;
    F2Table f2_table = F2Table::literal;
    std::string field_name;
    i64 r = 0;
};

inline nlohmann::json to_json(const ConstantEstimate& c)
{
    nlohmann::json trunc;
    if (c.method == ConstantMethod::sum)
        trunc = {{"K_max", c.K_max}, {"N_max", c.N_max}};
    else
        trunc = {{"L_max", c.L_max}, {"f2_table", to_string(c.f2_table)}};
    return {{"value", c.value},
            {"method", to_string(c.method)},
            {"truncations", trunc},
            {"tail_estimate", c.tail_estimate},
            {"field", c.field_name},
            {"r", c.r}};
}

inline constexpr u64 default_K_max = 200;
inline constexpr u64 default_N_max = 5000;
inline constexpr u64 default_L_max = 100000;

/// (2 n_A / pi) sum_{b in G} sum_{k <= K} sum_{n <= N} c_k(n) / (n k phi(lcm(m, n k^2))).
///
/// The tail estimate is a fitted majorant, not a certified bound: the absolute term
/// mass at n (summed over b, k) is compared with d(n)/n^2 on (N/2, N], the mass at k
/// with k^-3 on (K/2, K], and the fitted constants are extrapolated past N and K.
inline ConstantEstimate constant_sum(const GaloisFieldSpec& K, i64 r, u64 K_max = default_K_max, u64 N_max = default_N_max,
                                     unsigned workers = 1)
{
    if (K_max < 16 || N_max < 16) throw domain_error("constant_sum: truncations must be >= 16");
    const u64 m = K.m_K;
    const SpfSieve sieve(std::max(K_max, N_max));
    const auto fm = factorize(m);

    struct RowResult {
        CompensatedSum value;
        CompensatedSum half; // k <= K/2 and n <= N/2
    };

    std::deque<CoefficientEngine> engines; // engines hold a mutex: not movable
    for (u64 b : K.G_mK) engines.emplace_back(r, static_cast<i64>(b), m);

    auto rows = parallel_map(K_max, workers, [&](std::size_t idx) {
        const u64 k = idx + 1;
        RowResult row;
        if ((r & 1) && (k % 2 == 0)) return row; // r^2 - a k^2 odd: gcd never 4
        const auto fk = factorize(k, sieve);
        std::vector<CoefficientEngine::Local> locals;
        for (u64 n = 1; n <= N_max; ++n) {
            CoefficientEngine::merge_factorizations(fk, factorize(n, sieve), locals);
            // phi(lcm(m, n k^2)) from the merged exponents and those of m
            u64 phi = 1;
            std::size_t mi = 0;
            auto take = [&](u64 ell, int exp) {
                if (exp > 0) phi *= static_cast<u64>(ipow(static_cast<i64>(ell), exp - 1)) * (ell - 1);
            };
            for (const auto& l : locals) {
                while (mi < fm.size() && fm[mi].prime < l.ell) {
                    take(fm[mi].prime, fm[mi].exponent);
                    ++mi;
                }
                int exp = l.e + 2 * l.v;
                if (mi < fm.size() && fm[mi].prime == l.ell) exp = std::max(exp, fm[mi++].exponent);
                take(l.ell, exp);
            }
            for (; mi < fm.size(); ++mi) take(fm[mi].prime, fm[mi].exponent);
            const double denom = static_cast<double>(n) * static_cast<double>(k) * static_cast<double>(phi);
            const bool inner = 2 * k <= K_max && 2 * n <= N_max;
            for (const auto& eng : engines) {
                const i64 c = eng.coefficient(locals);
                if (c == 0) continue;
                const double term = static_cast<double>(c) / denom;
                row.value.add(term);
                if (inner) row.half.add(term);
            }
        }
        return row;
    });

    CompensatedSum total, half;
    for (const auto& row : rows) {
        total.merge(row.value);
        half.merge(row.half);
    }
    const double scale = 2.0 * static_cast<double>(K.n_A) / std::numbers::pi;

    ConstantEstimate out;
    out.value = scale * total.value();
    out.method = ConstantMethod::sum;
    out.K_max = K_max;
    out.N_max = N_max;
    // Heuristic: twice the change from halving both truncations (the terms cancel too
    // much for an absolute majorant to be informative).
    out.tail_estimate = 2.0 * scale * std::fabs(total.value() - half.value());
    out.field_name = K.name;
    out.r = r;
    return out;
}

/// One row of the 2-adic table: whether its guard holds, and its value (0 when it doesn't).
struct F2Row {
    int row;
    bool fires;
    Rational value;
};

/// All guards of the 2-adic table, evaluated independently (D = r^2 - 4b; ord_2(0) is
/// infinite, so D = 0 falls under row 3 or row 2). Row 15 exists only in the corrected table.
inline std::vector<F2Row> F2_rows(i64 r, i64 b, u64 m, F2Table table = F2Table::literal)
{
    const i64 delta = r * r - 4 * b;
    const int om = valuation(static_cast<i64>(m), 2);
    const bool od_finite = delta != 0;
    const int od = od_finite ? valuation(delta, 2) : std::numeric_limits<int>::max();
    const i64 unit = od_finite ? delta / ipow(2, od) : 0;
    const u64 u4 = mod_floor(unit, 4), u8 = mod_floor(unit, 8);
    const bool r_odd = (r & 1) != 0;
    const bool r2 = mod_floor(r, 4) == 2;
    const bool r0 = mod_floor(r, 4) == 0;
    const bool od_even = od_finite && od % 2 == 0;
    const bool od_odd = od_finite && od % 2 == 1;
    const bool om_below = od_finite ? om <= od - 2 : true;
    const u64 b4 = mod_floor(b, 4);
    const i64 d4_8 = od_finite && od >= 2 ? static_cast<i64>(mod_floor(delta / 4, 8)) : -1;
    auto pow2 = [](int e) { return ipow(2, e); };
    const bool fixed = table == F2Table::corrected;

    std::vector<F2Row> rows;
    auto row = [&](int id, bool fires, auto value) { rows.push_back({id, fires, fires ? Rational(value()) : Rational(0)}); };
    row(1, r_odd, [] { return Rational(2, 3); });
    row(2, !r_odd && m % 4 != 0, [] { return Rational(4, 3); });
    row(3, r2 && 2 <= om && om_below, [&] { return Rational(2) - Rational(2, 3 * pow2(om / 2)); });
    row(4, r2 && od_finite && om == od - 1 && od_even, [&] {
        return Rational(2) - Rational(4, 3 * pow2(fixed ? (om + 1) / 2 : (om - 1) / 2));
    });
    row(5, r2 && od_finite && om == od - 1 && od_odd, [&] { return Rational(2) - Rational(2, pow2(om / 2)); });
    row(6, r2 && om == od && od_even && u4 == 1, [&] { return Rational(2) - Rational(2, 3 * pow2(om / 2)); });
    row(7, r2 && om == od && (od_odd || (od_even && u4 == 3)), [&] { return Rational(2) - Rational(2, pow2(om / 2)); });
    row(8, r2 && od_finite && om > od && od_even && u8 == 1, [] { return Rational(2); });
    row(9, r2 && od_finite && om > od && od_even && u8 == 5, [&] { return Rational(2) - Rational(4, 3 * pow2(od / 2)); });
    row(10, r2 && od_finite && om > od && (od_odd || (od_even && u8 == 3)),
        [&] { return Rational(2) - Rational(2, pow2(od / 2)); });
    row(11, r0 && om == 2 && b4 == 3, [] { return Rational(5, 3); });
    row(12, r0 && m % 8 == 0 && b4 == 3 && d4_8 == 1, [] { return Rational(2); });
    row(13, r0 && m % 8 == 0 && b4 == 3 && d4_8 == 5, [] { return Rational(4, 3); });
    row(14, r0 && m % 4 == 0 && b4 == 1, [] { return Rational(1); });
    if (fixed)
        row(15, r2 && od_finite && om > od && od_even && u8 == 7, [&] { return Rational(2) - Rational(2, pow2(od / 2)); });
    return rows;
}

/// The 2-adic factor F_2(r, b, m). Exactly one row must fire; zero or several firing
/// rows are hard errors.
inline Rational F2_local(i64 r, i64 b, u64 m, F2Table table = F2Table::literal)
{
    if (std::gcd(static_cast<u64>(b < 0 ? -b : b), m) != 1) throw domain_error("F2_local: gcd(b, m) != 1");
    const auto rows = F2_rows(r, b, m, table);
    const F2Row* hit = nullptr;
    for (const auto& row : rows) {
        if (!row.fires) continue;
        if (hit) throw std::logic_error("F2_local: rows " + std::to_string(hit->row) + " and " + std::to_string(row.row)
                                        + " both fire for r=" + std::to_string(r) + " b=" + std::to_string(b)
                                        + " m=" + std::to_string(m));
        hit = &row;
    }
    if (!hit)
        throw std::logic_error("F2_local: no row fires for r=" + std::to_string(r) + " b=" + std::to_string(b)
                               + " m=" + std::to_string(m) + " (" + to_string(table) + " table)");
    return hit->value;
}

namespace detail {

inline Rational rpow(i64 base, int e)
{
    Rational out(1);
    for (int i = 0; i < e; ++i) out *= Rational(base);
    return out;
}

inline i64 floor_div2(int x) { return x >= 0 ? x / 2 : -((-x + 1) / 2); }

} // namespace detail

/// F(r, b, m) = F_2 times the correction factors at the odd primes dividing m.
inline Rational F_finite_product(i64 r, i64 b, u64 m, F2Table table = F2Table::literal)
{
    Rational F = F2_local(r, b, m, table);
    const i64 delta = r * r - 4 * b;
    for (const auto& [ell_u, om] : factorize(m)) {
        if (ell_u == 2) continue;
        const i64 ell = static_cast<i64>(ell_u);
        const Rational l(ell);
        if (r % ell == 0) {
            F *= Rational(ell * (ell + kronecker(-b, ell_u)), ell * ell - 1);
            continue;
        }
        const int od = valuation(delta, ell_u);
        if (od >= om) {
            const int hi = static_cast<int>(detail::floor_div2(om + 1));
            const int lo = static_cast<int>(detail::floor_div2(om - 1));
            const Rational first = (detail::rpow(ell, hi) - Rational(1)) / (detail::rpow(ell, lo) * Rational(ell - 1));
            const Rational second = detail::rpow(ell, om + 2) / (detail::rpow(ell, 3 * hi) * Rational(ell * ell - 1));
            F *= first + second;
        } else {
            const int chi = kronecker(delta, ell_u);
            const int gamma = (od > 0 && od % 2 == 0) ? kronecker(delta / ipow(ell, od), ell_u) : 0;
            Rational num = Rational(ell * chi + chi * chi);
            if (gamma != 0) num += Rational(ell * gamma + ell * ell * gamma * gamma) / detail::rpow(ell, od / 2);
            Rational factor = Rational(1) + num / Rational(ell * ell - 1);
            if (gamma != 0) {
                const int fl = static_cast<int>(detail::floor_div2(od - 1));
                const Rational lf = detail::rpow(ell, fl);
                factor += Rational(gamma * gamma) * (lf - Rational(1)) / (lf * Rational(ell - 1));
            }
            F *= factor;
        }
    }
    return F;
}

/// Euler-product form: 2 n_A / (pi phi(m)) * prod over odd l not dividing m of the
/// generic local factor (l <= L_max) * sum over b in G of F(r, b, m). Truncated factors
/// all lie below 1 by at most 1/((l+1)(l-1)^2) (l not dividing r), so the relative tail is
/// at most 1/(2(L-1)^2); for r = 0 every factor is l^2/(l^2-1) and the bound is 1/(L-1).
inline ConstantEstimate constant_product(const GaloisFieldSpec& K, i64 r, u64 L_max = default_L_max,
                                         F2Table table = F2Table::literal)
{
    if (L_max < 1000) throw domain_error("constant_product: L_max must be >= 1000");
    const u64 m = K.m_K;
    long double prod = 2.0L * static_cast<long double>(K.n_A) / (std::numbers::pi_v<long double> * static_cast<long double>(euler_phi(m)));
    for (u64 ell : primes_up_to(L_max)) {
        if (ell == 2 || m % ell == 0) continue;
        const long double l = static_cast<long double>(ell);
        if (r % static_cast<i64>(ell) == 0)
            prod *= l * l / (l * l - 1.0L);
        else
            prod *= l * (l * l - l - 1.0L) / ((l + 1.0L) * (l - 1.0L) * (l - 1.0L));
    }
    Rational Fsum;
    for (u64 b : K.G_mK) Fsum += F_finite_product(r, static_cast<i64>(b), m, table);
    const double value = static_cast<double>(prod * Fsum.to_long_double());
    const double Ld = static_cast<double>(L_max);
    const double rel = r == 0 ? 1.0 / (Ld - 1.0) : 1.0 / (2.0 * (Ld - 1.0) * (Ld - 1.0));

    ConstantEstimate out;
    out.value = value;
    out.method = ConstantMethod::product;
    out.L_max = L_max;
    out.f2_table = table;
    out.tail_estimate = value * std::expm1(rel);
    out.field_name = K.name;
    out.r = r;
    return out;
}

/// pi_{1/2}(x) = integral from 2 to x of dt / (2 sqrt(t) log t), integrated in u = log t
/// with adaptive Gauss-Kronrod to relative error 1e-12.
inline double pi_half(double x)
{
    if (!(x >= 2.0)) throw domain_error("pi_half: x must be >= 2");
    if (x == 2.0) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    auto integrand = [](double u) { return std::exp(u / 2.0) / (2.0 * u); };
    double err = 0.0;
    return gauss_kronrod<double, 31>::integrate(integrand, std::log(2.0), std::log(x), 20, 1e-12, &err);
}

} // namespace ltavg
