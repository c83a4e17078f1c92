#pragma once

// Galois number fields K = Q[x]/(poly) in the power basis {1, theta, ..., theta^(n-1)}:
// prime splitting, residue-field reductions, and empirical abelianization data.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <json.hpp>

#include "arith.hpp"
#include "finite_field.hpp"
#include "polymod.hpp"

namespace ltavg {

enum class DataSource { user_supplied, empirically_derived };

inline const char* to_string(DataSource s)
{
    return s == DataSource::user_supplied ? "user-supplied" : "empirically-derived";
}

struct AbelianData {
    u64 m_K = 1;
    u64 n_A = 1;
    std::vector<u64> G_mK{1}; ///< sorted residues mod m_K
};

struct GaloisFieldSpec {
    std::string name;
    PolyZ poly;  ///< monic, low degree first
    int n_K = 1;
    i64 disc = 1;
    u64 m_K = 1;
    u64 n_A = 1;
    std::vector<u64> G_mK{1};
    DataSource m_K_source = DataSource::empirically_derived;
    DataSource n_A_source = DataSource::empirically_derived;
    DataSource G_mK_source = DataSource::empirically_derived;
};

/// A prime of K of residue degree f above p, given by a monic irreducible factor of poly mod p.
struct DegreeFPrime {
    u64 p = 0;
    int f = 1;
    PolyP modulus_poly;

    FiniteField residue_field() const { return FiniteField(p, modulus_poly); }
    u64 norm() const
    {
        u64 q = 1;
        for (int i = 0; i < f; ++i) q *= p;
        return q;
    }
};

/// A rational prime splitting completely, with the n_K roots of poly mod p (ascending).
struct SplitPrime {
    u64 p;
    std::vector<u64> roots;
};

namespace detail {

using boost::multiprecision::cpp_int;

/// Fraction-free (Bareiss) determinant.
inline cpp_int bareiss_determinant(std::vector<std::vector<cpp_int>> m)
{
    const std::size_t n = m.size();
    if (n == 0) return 1;
    cpp_int sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
            if (swap_row == n) return 0;
            std::swap(m[k], m[swap_row]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

inline cpp_int discriminant_big(const PolyZ& f)
{
    const int n = static_cast<int>(f.size()) - 1;
    if (n <= 1) return 1;
    PolyZ df(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) df[static_cast<std::size_t>(i - 1)] = f[static_cast<std::size_t>(i)] * i;
    const int m = n - 1;
    const int size = n + m;
    std::vector<std::vector<cpp_int>> syl(static_cast<std::size_t>(size), std::vector<cpp_int>(static_cast<std::size_t>(size), 0));
    // rows 0..m-1: shifted f (high degree first); rows m..m+n-1: shifted f'
    for (int r = 0; r < m; ++r)
        for (int i = 0; i <= n; ++i) syl[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + i)] = f[static_cast<std::size_t>(n - i)];
    for (int r = 0; r < n; ++r)
        for (int i = 0; i <= m; ++i) syl[static_cast<std::size_t>(m + r)][static_cast<std::size_t>(r + i)] = df[static_cast<std::size_t>(m - i)];
    cpp_int res = bareiss_determinant(std::move(syl));
    if (((n * (n - 1)) / 2) % 2 == 1) res = -res;
    return res;
}

inline i64 eval_z(const PolyZ& f, i64 x)
{
    i128 acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
    return static_cast<i64>(acc);
}

/// Exact division test of integer polynomials, g monic.
inline bool divides_z(const PolyZ& g, PolyZ f)
{
    const std::size_t dg = g.size() - 1;
    if (f.size() < g.size()) return false;
    for (std::size_t i = f.size() - 1; i >= dg; --i) {
        const i64 c = f[i];
        if (c != 0)
            for (std::size_t j = 0; j <= dg; ++j) f[i - dg + j] -= c * g[j];
        if (i == dg) break;
    }
    return std::all_of(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(dg), [](i64 c) { return c == 0; });
}

inline std::vector<i64> signed_divisors(i64 v)
{
    std::vector<i64> out;
    for (u64 d : divisors(static_cast<u64>(v < 0 ? -v : v))) {
        out.push_back(static_cast<i64>(d));
        out.push_back(-static_cast<i64>(d));
    }
    return out;
}

/// Kronecker's method: does monic f have a monic integer factor of degree d?
inline bool has_factor_of_degree(const PolyZ& f, int d)
{
    using boost::multiprecision::cpp_rational;
    std::vector<i64> points;
    std::vector<std::vector<i64>> values;
    std::vector<std::pair<std::size_t, i64>> candidates;
    for (i64 x = -12; x <= 12; ++x) {
        const i64 v = eval_z(f, x);
        if (v == 0) return true; // rational root; caller handles d >= 1 generally
        candidates.emplace_back(divisors(static_cast<u64>(v < 0 ? -v : v)).size(), x);
    }
    std::sort(candidates.begin(), candidates.end());
    for (int i = 0; i <= d; ++i) {
        points.push_back(candidates[static_cast<std::size_t>(i)].second);
        values.push_back(signed_divisors(eval_z(f, points.back())));
    }
    std::vector<std::size_t> idx(points.size(), 0);
    while (true) {
        // Lagrange interpolation through (points[i], values[i][idx[i]])
        std::vector<cpp_rational> g(static_cast<std::size_t>(d) + 1, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::vector<cpp_rational> basis{1};
            cpp_rational denom = 1;
            for (std::size_t j = 0; j < points.size(); ++j) {
                if (j == i) continue;
                std::vector<cpp_rational> next(basis.size() + 1, 0);
                for (std::size_t k = 0; k < basis.size(); ++k) {
                    next[k + 1] += basis[k];
                    next[k] -= basis[k] * points[j];
                }
                basis = std::move(next);
                denom *= cpp_rational(points[i] - points[j]);
            }
            const cpp_rational scale = cpp_rational(values[i][idx[i]]) / denom;
            for (std::size_t k = 0; k < basis.size(); ++k) g[k] += basis[k] * scale;
        }
        if (g.back() == 1) {
            bool integral = true;
            PolyZ gz;
            for (const auto& c : g) {
                if (boost::multiprecision::denominator(c) != 1) {
                    integral = false;
                    break;
                }
                gz.push_back(static_cast<i64>(boost::multiprecision::numerator(c)));
            }
            if (integral && divides_z(gz, f)) return true;
        }
        std::size_t pos = 0;
        while (pos < idx.size() && ++idx[pos] == values[pos].size()) idx[pos++] = 0;
        if (pos == idx.size()) return false;
    }
}

inline std::vector<int> factor_degrees_mod_p(const PolyZ& poly, u64 p)
{
    std::vector<int> degs;
    for (const auto& [d, g] : polymod::distinct_degree_factor(polymod::reduce(poly, p), p))
        for (int k = 0; k < polymod::degree(g) / d; ++k) degs.push_back(d);
    return degs;
}

} // namespace detail

inline i64 polynomial_discriminant(const PolyZ& poly)
{
    const auto big = detail::discriminant_big(poly);
    if (big > INT64_MAX || big < -INT64_MAX) throw domain_error("discriminant exceeds 64 bits");
    return static_cast<i64>(big);
}

/// Irreducibility over Q of a monic integer polynomial with nonzero discriminant.
/// Factor-degree patterns modulo unramified primes rule out most factor degrees;
/// any degree they leave open is settled exactly by Kronecker's method.
inline bool is_irreducible(const PolyZ& poly, i64 disc)
{
    const int n = static_cast<int>(poly.size()) - 1;
    if (n <= 1) return true;
    std::vector<bool> possible(static_cast<std::size_t>(n) + 1, true);
    int checked = 0;
    for (u64 p = 2; checked < 200 && p < 100000; ++p) {
        if (!is_prime(p) || disc % static_cast<i64>(p) == 0) continue;
        ++checked;
        std::vector<bool> sums(static_cast<std::size_t>(n) + 1, false);
        sums[0] = true;
        for (int d : detail::factor_degrees_mod_p(poly, p))
            for (int s = n; s >= d; --s)
                if (sums[static_cast<std::size_t>(s - d)]) sums[static_cast<std::size_t>(s)] = true;
        for (int s = 0; s <= n; ++s) possible[static_cast<std::size_t>(s)] = possible[static_cast<std::size_t>(s)] && sums[static_cast<std::size_t>(s)];
    }
    for (int d = 1; 2 * d <= n; ++d) {
        if (!possible[static_cast<std::size_t>(d)]) continue;
        if (detail::has_factor_of_degree(poly, d)) return false;
    }
    return true;
}

inline bool divides_disc(i64 disc, u64 p) { return disc % static_cast<i64>(p) == 0; }

/// Smallest admissible norm bound: primes must exceed max{5, r^2/4}.
inline bool exceeds_B(u64 p, i64 r) { return p > 5 && 4 * static_cast<i128>(p) > static_cast<i128>(r) * r; }

/// Distinct roots of poly mod p in [0, p), ascending.
inline std::vector<u64> poly_roots_mod_p(const PolyZ& poly, u64 p) { return polymod::roots(polymod::reduce(poly, p), p); }

/// True when p is unramified in the power-basis order and splits into n_K degree-1 primes.
inline bool splits_completely(const GaloisFieldSpec& K, u64 p)
{
    if (divides_disc(K.disc, p)) return false;
    if (K.n_K == 1) return true;
    return polymod::count_roots(polymod::reduce(K.poly, p), p) == K.n_K;
}

/// Visits the rational primes p <= x admitted into the degree-1 prime set for trace r:
/// p splits completely, p > max{5, r^2/4}, p does not divide disc or m_K, and (for
/// n_K >= 2) p does not divide poly(0).
template <class Visitor>
void for_each_split_prime(const GaloisFieldSpec& K, u64 x, i64 r, Visitor&& visit)
{
    const i64 constant = K.poly.empty() ? 0 : K.poly[0];
    for (u64 p : primes_up_to(x)) {
        if (!exceeds_B(p, r)) continue;
        if (divides_disc(K.disc, p) || K.m_K % p == 0) continue;
        if (K.n_K >= 2 && constant % static_cast<i64>(p) == 0) continue;
        if (!splits_completely(K, p)) continue;
        visit(SplitPrime{p, K.n_K == 1 ? std::vector<u64>{0} : poly_roots_mod_p(K.poly, p)});
    }
}

inline std::vector<SplitPrime> split_primes_up_to(const GaloisFieldSpec& K, u64 x, i64 r)
{
    std::vector<SplitPrime> out;
    for_each_split_prime(K, x, r, [&](SplitPrime sp) { out.push_back(std::move(sp)); });
    return out;
}

inline DegreeFPrime degree_one_prime(u64 p, u64 root)
{
    return DegreeFPrime{p, 1, PolyP{(p - root % p) % p, 1}};
}

/// Primes of K of residue degree f above p (p must not divide disc). Returns n_K/f
/// primes when poly mod p factors uniformly into degree-f irreducibles, otherwise none.
inline std::vector<DegreeFPrime> degree_f_primes(const GaloisFieldSpec& K, u64 p, int f, std::ostream* warn = &std::cerr)
{
    if (f < 1) throw domain_error("degree_f_primes: f must be positive");
    if (divides_disc(K.disc, p)) throw domain_error("degree_f_primes: p divides the discriminant");
    const auto factors = polymod::factor_squarefree(polymod::reduce(K.poly, p), p);
    const bool uniform = std::all_of(factors.begin(), factors.end(),
                                     [&](const PolyP& g) { return polymod::degree(g) == polymod::degree(factors.front()); });
    if (!uniform) {
        if (warn) *warn << "warning: mixed factor degrees of " << K.name << " mod " << p << " (non-Galois input or index divisor)\n";
        return {};
    }
    if (factors.empty() || polymod::degree(factors.front()) != f) return {};
    std::vector<DegreeFPrime> out;
    for (const auto& g : factors) out.push_back({p, f, g});
    return out;
}

/// Image in F_p[t]/(g) of the power-basis element sum coords_j theta^j.
inline FiniteField::Elem reduce_element(std::span<const i64> coords, const DegreeFPrime& prime)
{
    const FiniteField F = prime.residue_field();
    PolyP c(coords.size());
    for (std::size_t j = 0; j < coords.size(); ++j) c[j] = mod_floor(coords[j], prime.p);
    polymod::trim(c);
    return F.from_coeffs(c);
}

/// Residues p mod q of split primes p <= budget with p not dividing q*disc.
struct NormResidues {
    u64 q = 1;
    std::vector<u64> residues;      ///< sorted
    std::vector<u64> counts;        ///< witnesses per residue
    std::vector<u64> half_residues; ///< same statistic at budget/2
    bool certified = false;         ///< >= 20 witnesses each and stable under doubling
    u64 split_count = 0;
};

namespace detail {

inline NormResidues residues_from_split_list(const std::vector<u64>& split, u64 q, i64 disc, u64 budget)
{
    NormResidues out;
    out.q = q;
    std::vector<u64> cnt(q, 0), half(q, 0);
    for (u64 p : split) {
        if (q % p == 0) continue;
        ++out.split_count;
        ++cnt[p % q];
        if (p <= budget / 2) ++half[p % q];
    }
    (void)disc;
    for (u64 a = 0; a < q; ++a) {
        if (cnt[a]) {
            out.residues.push_back(a % q);
            out.counts.push_back(cnt[a]);
        }
        if (half[a]) out.half_residues.push_back(a % q);
    }
    if (q == 1) {
        out.residues = {0};
        out.half_residues = {0};
    }
    out.certified = out.residues == out.half_residues
                    && std::all_of(out.counts.begin(), out.counts.end(), [](u64 c) { return c >= 20; });
    return out;
}

inline std::vector<u64> split_prime_list(const GaloisFieldSpec& K, u64 budget)
{
    std::vector<u64> out;
    for (u64 p : primes_up_to(budget))
        if (splits_completely(K, p)) out.push_back(p);
    return out;
}

} // namespace detail

inline NormResidues empirical_norm_residues_detail(const GaloisFieldSpec& K, u64 q, u64 budget)
{
    if (q < 1) throw domain_error("empirical_norm_residues: q must be positive");
    return detail::residues_from_split_list(detail::split_prime_list(K, budget), q, K.disc, budget);
}

/// Empirical image G_q of the residues of norms of degree-1 primes. Warns when some
/// residue class has fewer than 20 witnesses or the budget is below 100 q.
inline std::vector<u64> empirical_norm_residues(const GaloisFieldSpec& K, u64 q, u64 budget, std::ostream* warn = &std::cerr)
{
    auto res = empirical_norm_residues_detail(K, q, budget);
    if (warn && (budget < 100 * q || !res.certified))
        *warn << "warning: budget " << budget << " too small to certify G_" << q << " for " << K.name << "\n";
    if (q == 1) return {0};
    return res.residues;
}

inline bool is_subgroup_of_units(const std::vector<u64>& G, u64 m)
{
    if (m == 1) return G.size() == 1;
    std::set<u64> s(G.begin(), G.end());
    if (!s.count(1 % m)) return false;
    for (u64 a : s) {
        if (std::gcd(a, m) != 1) return false;
        for (u64 b : s)
            if (!s.count(mulmod(a, b, m))) return false;
    }
    return true;
}

/// Default prime budget for empirical abelianization data.
inline constexpr u64 default_abelian_budget = 1'000'000;

/// (m_K, n_A, G_mK) from empirical norm residues: over moduli q dividing 4|disc| whose
/// residue classes the budget can resolve, the index phi(q)/|G_q| is the degree of
/// K meets Q(zeta_q); n_A is its maximum and m_K the least q attaining it.
inline AbelianData abelian_invariants(const GaloisFieldSpec& K, u64 budget = default_abelian_budget)
{
    const auto split = detail::split_prime_list(K, budget);
    const u64 search = 4 * static_cast<u64>(K.disc < 0 ? -K.disc : K.disc);
    AbelianData best;
    bool found = false;
    u64 unresolved_max = 0;
    for (u64 q : divisors(search)) {
        const u64 phi = euler_phi(q);
        if (phi * 20 * 2 > split.size() && q > 1) continue; // class sizes too small to resolve
        auto res = detail::residues_from_split_list(split, q, K.disc, budget);
        const u64 group = q == 1 ? 1 : res.residues.size();
        if (group == 0 || phi % group != 0 || !is_subgroup_of_units(q == 1 ? std::vector<u64>{0} : res.residues, q)) {
            unresolved_max = std::max<u64>(unresolved_max, group ? phi / group : phi);
            continue;
        }
        const u64 index = phi / group;
        if (!res.certified) {
            unresolved_max = std::max(unresolved_max, index);
            continue;
        }
        if (!found || index > best.n_A) {
            best = AbelianData{q, index, q == 1 ? std::vector<u64>{1} : res.residues};
            found = true;
        }
    }
    if (!found || unresolved_max > best.n_A)
        throw domain_error("abelian_invariants: no stable maximum for " + K.name
                           + "; raise the prime budget or supply m_K/n_A/G_mK overrides");
    if (best.m_K == 1) best.G_mK = {1};
    if (K.n_K % static_cast<int>(best.n_A) != 0)
        throw domain_error("abelian_invariants: derived n_A does not divide n_K for " + K.name);
    return best;
}

/// Uniform factor degrees at 100 unramified primes; otherwise the input is not Galois.
inline void check_galois_diagnostic(const GaloisFieldSpec& K)
{
    int checked = 0;
    for (u64 p = 5; checked < 100; p += 2) {
        if (!is_prime(p) || divides_disc(K.disc, p)) continue;
        ++checked;
        const auto degs = detail::factor_degrees_mod_p(K.poly, p);
        if (!std::all_of(degs.begin(), degs.end(), [&](int d) { return d == degs.front(); }))
            throw domain_error("field " + K.name + " fails the Galois diagnostic: mixed residue degrees mod "
                               + std::to_string(p));
    }
}

struct FieldOverrides {
    std::optional<u64> m_K;
    std::optional<u64> n_A;
    std::optional<std::vector<u64>> G_mK;
};

/// Builds a field spec, computing the discriminant and (absent overrides) the
/// abelianization data. Irreducibility is checked; Galois-ness is a trusted input,
/// screened by the residue-degree diagnostic.
inline GaloisFieldSpec parse_field(const PolyZ& poly, const FieldOverrides& overrides = {}, std::string name = "custom",
                                   u64 budget = default_abelian_budget)
{
    if (poly.size() < 2) throw domain_error("parse_field: polynomial must have degree >= 1");
    if (poly.back() != 1) throw domain_error("parse_field: polynomial must be monic");
    GaloisFieldSpec K;
    K.name = std::move(name);
    K.poly = poly;
    K.n_K = static_cast<int>(poly.size()) - 1;
    K.disc = polynomial_discriminant(poly);
    if (K.disc == 0) throw domain_error("parse_field: polynomial is not squarefree (zero discriminant)");
    if (!is_irreducible(poly, K.disc)) throw domain_error("parse_field: polynomial is reducible over Q");
    check_galois_diagnostic(K);

    const bool any = overrides.m_K || overrides.n_A || overrides.G_mK;
    if (any) {
        if (!(overrides.m_K && overrides.n_A && overrides.G_mK))
            throw domain_error("parse_field: overrides must supply m_K, n_A and G_mK together");
        K.m_K = *overrides.m_K;
        K.n_A = *overrides.n_A;
        K.G_mK = *overrides.G_mK;
        for (auto& g : K.G_mK) g %= K.m_K;
        if (K.m_K == 1) K.G_mK = {1};
        std::sort(K.G_mK.begin(), K.G_mK.end());
        K.G_mK.erase(std::unique(K.G_mK.begin(), K.G_mK.end()), K.G_mK.end());
        K.m_K_source = K.n_A_source = K.G_mK_source = DataSource::user_supplied;
    } else {
        const auto ab = abelian_invariants(K, budget);
        K.m_K = ab.m_K;
        K.n_A = ab.n_A;
        K.G_mK = ab.G_mK;
    }
    if (K.m_K == 0 || K.n_A == 0) throw domain_error("parse_field: m_K and n_A must be positive");
    if (K.m_K > 1 && !is_subgroup_of_units(K.G_mK, K.m_K))
        throw domain_error("parse_field: G_mK is not a subgroup of the units mod m_K");
    if (K.G_mK.size() * K.n_A != euler_phi(K.m_K))
        throw domain_error("parse_field: |G_mK| * n_A != phi(m_K)");
    if (K.n_K % static_cast<int>(K.n_A) != 0) throw domain_error("parse_field: n_A must divide n_K");
    return K;
}

/// Built-in presets. S3_x3m2 is the splitting field of x^3 - 2, generated by
/// theta = cbrt(2) sqrt(-3) with theta^6 = -108.
inline PolyZ preset_polynomial(const std::string& name)
{
    if (name == "Q") return {0, 1};
    if (name == "Q_i") return {1, 0, 1};
    if (name == "Q_sqrt2") return {-2, 0, 1};
    if (name == "Q_zeta3") return {1, 1, 1};
    if (name == "Q_zeta5") return {1, 1, 1, 1, 1};
    if (name == "S3_x3m2") return {108, 0, 0, 0, 0, 0, 1};
    throw std::invalid_argument("unknown field preset: " + name);
}

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"Q", "Q_i", "Q_sqrt2", "Q_zeta3", "Q_zeta5", "S3_x3m2"};
    return names;
}

inline GaloisFieldSpec preset_field(const std::string& name, u64 budget = default_abelian_budget)
{
    return parse_field(preset_polynomial(name), {}, name, budget);
}

/// Field preset JSON: {"name": str, "poly": [c0, ..., 1], "overrides": {"m_K", "n_A", "G_mK"}?}.
inline GaloisFieldSpec field_from_json(const nlohmann::json& j, u64 budget = default_abelian_budget)
{
    if (!j.contains("poly") || !j.at("poly").is_array()) throw std::invalid_argument("field file: missing \"poly\" array");
    const PolyZ poly = j.at("poly").get<PolyZ>();
    FieldOverrides ov;
    if (j.contains("overrides")) {
        const auto& o = j.at("overrides");
        if (o.contains("m_K")) ov.m_K = o.at("m_K").get<u64>();
        if (o.contains("n_A")) ov.n_A = o.at("n_A").get<u64>();
        if (o.contains("G_mK")) ov.G_mK = o.at("G_mK").get<std::vector<u64>>();
    }
    return parse_field(poly, ov, j.value("name", std::string("custom")), budget);
}

inline nlohmann::json field_to_json(const GaloisFieldSpec& K)
{
    return {{"name", K.name},
            {"poly", K.poly},
            {"n_K", K.n_K},
            {"disc", K.disc},
            {"m_K", K.m_K},
            {"n_A", K.n_A},
            {"G_mK", K.G_mK},
            {"data_source",
             {{"m_K", to_string(K.m_K_source)}, {"n_A", to_string(K.n_A_source)}, {"G_mK", to_string(K.G_mK_source)}}}};
}

/// Resolves a preset name or a path to a field JSON file.
inline GaloisFieldSpec load_field(const std::string& name_or_path, u64 budget = default_abelian_budget)
{
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return preset_field(name_or_path, budget);
    std::ifstream in(name_or_path);
    if (!in) throw std::invalid_argument("unknown field preset or unreadable file: " + name_or_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("field file " + name_or_path + ": " + e.what());
    }
    return field_from_json(j, budget);
}

} // namespace ltavg
