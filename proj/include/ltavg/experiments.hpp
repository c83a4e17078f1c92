#pragma once

// Desk-scale experiments: box averages and variance of pi_E^{r,f}(x), the class-number
// prime sum, the weighted L-value average A_1(x; r), isomorphic-reduction counts in a
// box, and the Chebotarev statistic theta_K(x; 1, q, a).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "arith.hpp"
#include "classnumber.hpp"
#include "curves.hpp"
#include "finite_field.hpp"
#include "ltconstant.hpp"
#include "numberfield.hpp"
#include "parallel.hpp"
#include "rational.hpp"
#include "summation.hpp"

namespace ltavg {

/// Box of Weierstrass models y^2 = x^3 + alpha x + beta with alpha in the coordinate
/// box a1 +- b1 and beta in a2 +- b2 (power-basis coordinates). Models are counted
/// with multiplicity.
struct CurveBox {
    std::vector<i64> a1, b1, a2, b2;

    std::size_t dimension() const { return a1.size(); }

    void validate(int n_K) const
    {
        const auto n = static_cast<std::size_t>(n_K);
        if (a1.size() != n || b1.size() != n || a2.size() != n || b2.size() != n)
            throw std::invalid_argument("box vectors must all have length n_K = " + std::to_string(n_K));
        for (const auto* radii : {&b1, &b2})
            for (i64 v : *radii)
                if (v < 1) throw std::invalid_argument("box radii must be positive");
    }

    u64 alpha_count() const
    {
        u64 c = 1;
        for (i64 v : b1) c *= static_cast<u64>(2 * v + 1);
        return c;
    }
    u64 beta_count() const
    {
        u64 c = 1;
        for (i64 v : b2) c *= static_cast<u64>(2 * v + 1);
        return c;
    }
    u64 cardinality() const { return alpha_count() * beta_count(); }

    /// V = 2^(2n) prod b1_j b2_j (the product reading of the size quantity).
    double V() const { return V1() * V2(); }
    double V1() const
    {
        double v = 1.0;
        for (i64 b : b1) v *= 2.0 * static_cast<double>(b);
        return v;
    }
    double V2() const
    {
        double v = 1.0;
        for (i64 b : b2) v *= 2.0 * static_cast<double>(b);
        return v;
    }
    /// 2 min over all 2 n_K radii.
    double V_min() const
    {
        i64 lo = b1.empty() ? 0 : b1.front();
        for (const auto* radii : {&b1, &b2})
            for (i64 v : *radii) lo = std::min(lo, v);
        return 2.0 * static_cast<double>(lo);
    }

    /// Enumerates the alpha (which == 0) or beta (which == 1) coordinate vectors.
    template <class Fn>
    void for_each_point(int which, Fn&& fn) const
    {
        const auto& center = which == 0 ? a1 : a2;
        const auto& radius = which == 0 ? b1 : b2;
        std::vector<i64> cur(center.size());
        for (std::size_t j = 0; j < center.size(); ++j) cur[j] = center[j] - radius[j];
        while (true) {
            fn(std::span<const i64>(cur));
            std::size_t j = 0;
            for (; j < cur.size(); ++j) {
                if (cur[j] < center[j] + radius[j]) {
                    ++cur[j];
                    break;
                }
                cur[j] = center[j] - radius[j];
            }
            if (j == cur.size()) return;
        }
    }
};

inline std::vector<i64> parse_int_vector(const std::string& text)
{
    std::vector<i64> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) throw std::invalid_argument("empty entry in integer vector \"" + text + "\"");
        std::size_t used = 0;
        const i64 v = std::stoll(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad integer \"" + item + "\"");
        out.push_back(v);
    }
    return out;
}

/// Parses "a1=(...);b1=(...);a2=(...);b2=(...)".
inline CurveBox parse_box(const std::string& text)
{
    CurveBox box;
    const std::regex part(R"(\s*(a1|b1|a2|b2)\s*=\s*\(([^)]*)\)\s*)");
    std::stringstream ss(text);
    std::string item;
    int seen = 0;
    while (std::getline(ss, item, ';')) {
        std::smatch m;
        if (!std::regex_match(item, m, part)) throw std::invalid_argument("bad box component \"" + item + "\"");
        auto vec = parse_int_vector(m[2].str());
        const std::string key = m[1].str();
        auto& slot = key == "a1" ? box.a1 : key == "b1" ? box.b1 : key == "a2" ? box.a2 : box.b2;
        if (!slot.empty()) throw std::invalid_argument("box component " + key + " given twice");
        slot = std::move(vec);
        ++seen;
    }
    if (seen != 4) throw std::invalid_argument("box needs a1, b1, a2 and b2");
    return box;
}

inline std::string format_box(const CurveBox& box)
{
    auto vec = [](const std::vector<i64>& v) {
        std::string s = "(";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + ")";
    };
    return "a1=" + vec(box.a1) + ";b1=" + vec(box.b1) + ";a2=" + vec(box.a2) + ";b2=" + vec(box.b2);
}

/// Multiset of residue-field images of one coordinate box, as sorted (element, count) pairs.
using ReductionHistogram = std::vector<std::pair<u64, u64>>;

namespace detail {

inline void merge_sorted(ReductionHistogram& h)
{
    std::sort(h.begin(), h.end());
    std::size_t w = 0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (w > 0 && h[w - 1].first == h[i].first)
            h[w - 1].second += h[i].second;
        else
            h[w++] = h[i];
    }
    h.resize(w);
}

/// Number of integers in [lo, hi] congruent to res mod m.
inline u64 count_in_class(i64 lo, i64 hi, u64 res, u64 m)
{
    const i64 mi = static_cast<i64>(m);
    const i64 first = lo + static_cast<i64>(mod_floor(static_cast<i64>(res) - lo, m));
    if (first > hi) return 0;
    return static_cast<u64>((hi - first) / mi + 1);
}

} // namespace detail

/// Images of theta^j (j < n_K) in the residue fields of one or two primes, combined
/// into a joint encoding e_0 + q_0 e_1.
class BoxReducer {
public:
    explicit BoxReducer(std::vector<DegreeFPrime> primes) : primes_(std::move(primes))
    {
        for (const auto& pr : primes_) fields_.push_back(pr.residue_field());
    }

    void set_dimension(std::size_t n)
    {
        basis_.assign(fields_.size(), {});
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            const auto& F = fields_[i];
            const auto theta = F.from_coeffs(PolyP{0, 1});
            FiniteField::Elem power = F.one();
            for (std::size_t j = 0; j < n; ++j) {
                basis_[i].push_back(power);
                power = F.mul(power, theta);
            }
        }
    }

    const std::vector<FiniteField>& fields() const { return fields_; }

    u64 joint_size() const
    {
        u64 s = 1;
        for (const auto& F : fields_) s *= F.size();
        return s;
    }

    /// Histogram of the joint images of the coordinate box center +- radius.
    ReductionHistogram histogram(const std::vector<i64>& center, const std::vector<i64>& radius)
    {
        set_dimension(center.size());
        u64 modulus = 1; // product of characteristics: images depend on coordinates mod this
        for (const auto& F : fields_) modulus *= F.characteristic();
        ReductionHistogram dist{{0, 1}};
        for (std::size_t j = 0; j < center.size(); ++j) {
            const i64 lo = center[j] - radius[j], hi = center[j] + radius[j];
            ReductionHistogram step;
            if (static_cast<u64>(hi - lo + 1) <= modulus) {
                for (i64 v = lo; v <= hi; ++v) step.emplace_back(image(j, v), 1);
            } else {
                for (u64 res = 0; res < modulus; ++res)
                    step.emplace_back(image(j, static_cast<i64>(res)), detail::count_in_class(lo, hi, res, modulus));
            }
            detail::merge_sorted(step);
            if (j == 0) {
                dist = std::move(step);
                continue;
            }
            ReductionHistogram next;
            next.reserve(std::min<u64>(dist.size() * step.size(), joint_size()));
            for (const auto& [x, cx] : dist)
                for (const auto& [y, cy] : step) next.emplace_back(add(x, y), cx * cy);
            detail::merge_sorted(next);
            dist = std::move(next);
        }
        return dist;
    }

    /// Joint image of a full coordinate vector.
    u64 reduce(std::span<const i64> coords)
    {
        if (basis_.empty() || basis_[0].size() != coords.size()) set_dimension(coords.size());
        u64 acc = 0;
        for (std::size_t j = 0; j < coords.size(); ++j) acc = add(acc, image(j, coords[j]));
        return acc;
    }

    u64 component(u64 joint, std::size_t i) const
    {
        for (std::size_t t = 0; t < i; ++t) joint /= fields_[t].size();
        return joint % fields_[i].size();
    }

    u64 combine(std::span<const u64> parts) const
    {
        u64 acc = 0, scale = 1;
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            acc += parts[i] * scale;
            scale *= fields_[i].size();
        }
        return acc;
    }

private:
    u64 image(std::size_t j, i64 v) const
    {
        u64 acc = 0, scale = 1;
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            const auto& F = fields_[i];
            acc += F.mul(F.from_int(v), basis_[i][j]) * scale;
            scale *= F.size();
        }
        return acc;
    }

    u64 add(u64 x, u64 y) const
    {
        u64 acc = 0, scale = 1;
        for (const auto& F : fields_) {
            const u64 q = F.size();
            acc += F.add(x % q, y % q) * scale;
            x /= q;
            y /= q;
            scale *= q;
        }
        return acc;
    }

    std::vector<DegreeFPrime> primes_;
    std::vector<FiniteField> fields_;
    std::vector<std::vector<FiniteField::Elem>> basis_;
};

/// Every prime of K of degree f with norm <= x admitted into the experiment. Degree 1
/// uses the split-prime filters for trace r; degree f >= 2 requires p > 3, p not
/// dividing disc, and p^f <= x.
inline std::vector<DegreeFPrime> experiment_primes(const GaloisFieldSpec& K, i64 r, int f, u64 x)
{
    std::vector<DegreeFPrime> out;
    if (f < 1) throw domain_error("residue degree f must be positive");
    if (f == 1) {
        for_each_split_prime(K, x, r, [&](const SplitPrime& sp) {
            for (u64 root : sp.roots) out.push_back(degree_one_prime(sp.p, root));
        });
        return out;
    }
    if (K.n_K % f != 0) return out;
    for (u64 p : primes_up_to(static_cast<u64>(std::pow(static_cast<double>(x), 1.0 / f)) + 2)) {
        if (p <= 3 || divides_disc(K.disc, p)) continue;
        u64 q = 1;
        bool fits = true;
        for (int i = 0; i < f; ++i) {
            if (q > x / p) {
                fits = false;
                break;
            }
            q *= p;
        }
        if (!fits || q > x) continue;
        for (auto& pr : degree_f_primes(K, p, f, nullptr)) out.push_back(std::move(pr));
    }
    return out;
}

/// pi_E^{r,f}(x): primes of degree f, norm <= x and good reduction with a_p(E) = r.
inline u64 pi_E_rf(const GaloisFieldSpec& K, const CurveModel& E, i64 r, int f, u64 x)
{
    if (E.alpha.size() != static_cast<std::size_t>(K.n_K) || E.beta.size() != static_cast<std::size_t>(K.n_K))
        throw std::invalid_argument("curve coordinates must have length n_K");
    u64 count = 0;
    for (const auto& pr : experiment_primes(K, r, f, x)) {
        const u64 q = pr.norm();
        if (static_cast<i128>(r) * r > 4 * static_cast<i128>(q)) continue;
        const auto F = pr.residue_field();
        const auto a = reduce_element(E.alpha, pr), b = reduce_element(E.beta, pr);
        if (is_singular(F, a, b)) continue;
        if (trace_mod_q(ReducedCurve{F, a, b}) == r) ++count;
    }
    return count;
}

struct ReportRow {
    double x = 0.0;
    double empirical = 0.0;
    std::optional<double> theoretical;
    std::optional<double> ratio;
};

/// Structured experiment output. `config` and `rows` form the deterministic report
/// body; runtime lives in the metadata block emitted separately.
struct ExperimentReport {
    std::string experiment;
    nlohmann::json config = nlohmann::json::object();
    std::optional<ConstantEstimate> constant;
    std::vector<ReportRow> rows;
    nlohmann::json extra = nlohmann::json::object();
    double runtime_seconds = 0.0;

    void add_row(double x, double empirical, std::optional<double> theoretical)
    {
        ReportRow row{x, empirical, theoretical, std::nullopt};
        if (theoretical && *theoretical != 0.0) row.ratio = empirical / *theoretical;
        rows.push_back(row);
    }
};

inline std::vector<u64> normalize_checkpoints(std::vector<u64> cps)
{
    if (cps.empty()) throw std::invalid_argument("at least one checkpoint is required");
    for (std::size_t i = 1; i < cps.size(); ++i)
        if (cps[i] <= cps[i - 1]) throw std::invalid_argument("checkpoints must be strictly increasing");
    return cps;
}

struct ExperimentOptions {
    std::vector<u64> checkpoints;           ///< strictly increasing x values; last is the run bound
    unsigned workers = 1;
    std::optional<ConstantEstimate> constant; ///< defaults to the product form at L_max = 10^5
};

namespace detail {

inline ConstantEstimate resolve_constant(const GaloisFieldSpec& K, i64 r, const ExperimentOptions& opt)
{
    return opt.constant ? *opt.constant : constant_product(K, r);
}

class Stopwatch {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Traces of all (a, b) pairs from two histograms over F_p, by fixing a and sweeping
/// b against a doubled character table (no reductions in the inner loop).
struct PrimeFieldSweep {
    u64 p;
    std::vector<std::int8_t> chi2; // chi on [0, 2p)
    std::vector<u64> cubes;

    explicit PrimeFieldSweep(u64 prime) : p(prime), chi2(2 * prime), cubes(prime)
    {
        CharacterTable chi{FiniteField(p)};
        for (u64 v = 0; v < 2 * p; ++v) chi2[v] = chi(v % p);
        for (u64 x = 0; x < p; ++x) cubes[x] = mulmod(mulmod(x, x, p), x, p);
    }

    /// w[x] = x^3 + a x mod p
    void shifted(u64 a, std::vector<u64>& w) const
    {
        w.resize(p);
        u64 ax = 0;
        for (u64 x = 0; x < p; ++x) {
            u64 v = cubes[x] + ax;
            if (v >= p) v -= p;
            w[x] = v;
            ax += a;
            if (ax >= p) ax -= p;
        }
    }

    i64 trace(const std::vector<u64>& w, u64 b) const
    {
        i64 s = 0;
        const std::int8_t* c = chi2.data() + b;
        for (u64 x = 0; x < p; ++x) s += c[w[x]];
        return -s;
    }
};

/// For one prime: flags[i][j] = 1 iff the i-th distinct alpha image and the j-th
/// distinct beta image give a nonsingular curve of trace r.
inline std::vector<std::vector<std::uint8_t>> trace_match_matrix(const DegreeFPrime& pr, const ReductionHistogram& ha,
                                                                 const ReductionHistogram& hb, i64 r)
{
    std::vector<std::vector<std::uint8_t>> flags(ha.size(), std::vector<std::uint8_t>(hb.size(), 0));
    const u64 q = pr.norm();
    if (static_cast<i128>(r) * r > 4 * static_cast<i128>(q)) return flags;
    if (pr.f == 1) {
        const PrimeFieldSweep sweep(pr.p);
        std::vector<u64> w;
        for (std::size_t i = 0; i < ha.size(); ++i) {
            const u64 a = ha[i].first;
            sweep.shifted(a, w);
            for (std::size_t j = 0; j < hb.size(); ++j) {
                const u64 b = hb[j].first;
                if (is_singular_mod_p(a, b, pr.p)) continue;
                flags[i][j] = sweep.trace(w, b) == r ? 1 : 0;
            }
        }
        return flags;
    }
    const TraceCounter counter(pr.residue_field());
    for (std::size_t i = 0; i < ha.size(); ++i)
        for (std::size_t j = 0; j < hb.size(); ++j) {
            if (is_singular(counter.field(), ha[i].first, hb[j].first)) continue;
            flags[i][j] = counter.trace_unchecked(ha[i].first, hb[j].first) == r ? 1 : 0;
        }
    return flags;
}

inline nlohmann::json box_json(const CurveBox& box)
{
    return {{"spec", format_box(box)},
            {"cardinality", box.cardinality()},
            {"V", box.V()},
            {"V1", box.V1()},
            {"V2", box.V2()},
            {"V_min", box.V_min()}};
}

} // namespace detail

/// (1/#B) sum over the box of pi_E^{r,f}(x) at each checkpoint, by per-prime
/// aggregation over distinct reduced pairs. For f = 1 the theoretical column is
/// c_{K,r,1} pi_{1/2}(x).
inline ExperimentReport box_average(const GaloisFieldSpec& K, const CurveBox& box, i64 r, int f, const ExperimentOptions& opt)
{
    detail::Stopwatch clock;
    box.validate(K.n_K);
    const auto cps = normalize_checkpoints(opt.checkpoints);
    const auto primes = experiment_primes(K, r, f, cps.back());
    const auto matches = parallel_map(primes.size(), opt.workers, [&](std::size_t i) -> u64 {
        BoxReducer red({primes[i]});
        const auto ha = red.histogram(box.a1, box.b1);
        const auto hb = red.histogram(box.a2, box.b2);
        const auto flags = detail::trace_match_matrix(primes[i], ha, hb, r);
        u64 total = 0;
        for (std::size_t a = 0; a < ha.size(); ++a)
            for (std::size_t b = 0; b < hb.size(); ++b)
                if (flags[a][b]) total += ha[a].second * hb[b].second;
        return total;
    });
    ExperimentReport rep;
    rep.experiment = "box-average";
    rep.config = {{"field", K.name}, {"r", r}, {"f", f}, {"box", detail::box_json(box)}, {"checkpoints", cps}};
    if (f == 1) rep.constant = detail::resolve_constant(K, r, opt);
    const double card = static_cast<double>(box.cardinality());
    std::size_t idx = 0;
    u64 running = 0;
    for (u64 x : cps) {
        while (idx < primes.size() && primes[idx].norm() <= x) running += matches[idx++];
        std::optional<double> theory;
        if (rep.constant) theory = rep.constant->value * pi_half(static_cast<double>(x));
        rep.add_row(static_cast<double>(x), static_cast<double>(running) / card, theory);
    }
    rep.runtime_seconds = clock.seconds();
    return rep;
}

/// (1/#B) sum over the box of (pi_E^{r,1}(x) - C pi_{1/2}(x))^2 at each checkpoint.
/// C defaults to the average constant. The theoretical column is x / log(x)^2, the
/// order of the variance bound.
inline ExperimentReport box_variance(const GaloisFieldSpec& K, const CurveBox& box, i64 r, const ExperimentOptions& opt,
                                     std::optional<double> C = std::nullopt)
{
    detail::Stopwatch clock;
    box.validate(K.n_K);
    const auto cps = normalize_checkpoints(opt.checkpoints);
    const auto primes = experiment_primes(K, r, 1, cps.back());
    ExperimentReport rep;
    rep.experiment = "box-variance";
    rep.constant = detail::resolve_constant(K, r, opt);
    const double c = C ? *C : rep.constant->value;
    rep.config = {{"field", K.name}, {"r", r}, {"f", 1}, {"box", detail::box_json(box)}, {"checkpoints", cps}, {"C", c}};

    // Per-model reduced images, shared across primes via per-prime reducers.
    std::vector<std::vector<i64>> alphas, betas;
    box.for_each_point(0, [&](std::span<const i64> v) { alphas.emplace_back(v.begin(), v.end()); });
    box.for_each_point(1, [&](std::span<const i64> v) { betas.emplace_back(v.begin(), v.end()); });
    const std::size_t nb = betas.size();
    std::vector<u64> pi(alphas.size() * nb, 0);

    constexpr std::size_t batch = 64;
    std::size_t idx = 0;
    std::size_t cp = 0;
    auto emit_until = [&](u64 bound) {
        while (cp < cps.size() && cps[cp] < bound) {
            const double target = c * pi_half(static_cast<double>(cps[cp]));
            CompensatedSum s;
            for (u64 v : pi) {
                const double d = static_cast<double>(v) - target;
                s.add(d * d);
            }
            const double x = static_cast<double>(cps[cp]);
            rep.add_row(x, s.value() / static_cast<double>(pi.size()), x / (std::log(x) * std::log(x)));
            ++cp;
        }
    };
    while (idx < primes.size()) {
        const std::size_t end = std::min(primes.size(), idx + batch);
        auto hits = parallel_map(end - idx, opt.workers, [&](std::size_t t) {
            const auto& pr = primes[idx + t];
            BoxReducer red({pr});
            std::vector<u64> ia(alphas.size()), ib(nb);
            for (std::size_t i = 0; i < alphas.size(); ++i) ia[i] = red.reduce(alphas[i]);
            for (std::size_t j = 0; j < nb; ++j) ib[j] = red.reduce(betas[j]);
            ReductionHistogram ha, hb;
            for (u64 v : ia) ha.emplace_back(v, 1);
            for (u64 v : ib) hb.emplace_back(v, 1);
            detail::merge_sorted(ha);
            detail::merge_sorted(hb);
            const auto flags = detail::trace_match_matrix(pr, ha, hb, r);
            auto pos = [](const ReductionHistogram& h, u64 v) {
                return static_cast<std::size_t>(
                    std::lower_bound(h.begin(), h.end(), std::make_pair(v, u64{0})) - h.begin());
            };
            std::vector<std::uint32_t> ra(ia.size()), rb(ib.size());
            for (std::size_t i = 0; i < ia.size(); ++i) ra[i] = static_cast<std::uint32_t>(pos(ha, ia[i]));
            for (std::size_t j = 0; j < ib.size(); ++j) rb[j] = static_cast<std::uint32_t>(pos(hb, ib[j]));
            std::vector<std::uint32_t> matched;
            for (std::size_t i = 0; i < ia.size(); ++i)
                for (std::size_t j = 0; j < nb; ++j)
                    if (flags[ra[i]][rb[j]]) matched.push_back(static_cast<std::uint32_t>(i * nb + j));
            return matched;
        });
        for (std::size_t t = 0; t < hits.size(); ++t) {
            emit_until(primes[idx + t].norm());
            for (auto m : hits[t]) ++pi[m];
        }
        idx = end;
    }
    emit_until(UINT64_MAX);
    u64 max_pi = 0;
    for (u64 v : pi) max_pi = std::max(max_pi, v);
    rep.extra = {{"max_pi", max_pi}};
    rep.runtime_seconds = clock.seconds();
    return rep;
}

/// (n_K / 2) sum over split primes p <= x (trace-r filters) of H(r^2 - 4p)/p, against
/// c_{K,r,1} pi_{1/2}(x).
inline ExperimentReport hurwitz_prime_sum(const GaloisFieldSpec& K, i64 r, const ExperimentOptions& opt)
{
    detail::Stopwatch clock;
    const auto cps = normalize_checkpoints(opt.checkpoints);
    if (cps.front() < 7) throw domain_error("hurwitz_prime_sum: x must be >= 7");
    const auto split = split_primes_up_to(K, cps.back(), r);
    const auto terms = parallel_map(split.size(), opt.workers, [&](std::size_t i) {
        const i64 p = static_cast<i64>(split[i].p);
        return hurwitz_H(r * r - 4 * p).to_double() / static_cast<double>(p);
    });
    ExperimentReport rep;
    rep.experiment = "hurwitz-sum";
    rep.config = {{"field", K.name}, {"r", r}, {"checkpoints", cps}};
    rep.constant = detail::resolve_constant(K, r, opt);
    CompensatedSum s;
    std::size_t idx = 0;
    for (u64 x : cps) {
        while (idx < split.size() && split[idx].p <= x) s.add(terms[idx++]);
        rep.add_row(static_cast<double>(x), 0.5 * K.n_K * s.value(), rep.constant->value * pi_half(static_cast<double>(x)));
    }
    rep.runtime_seconds = clock.seconds();
    return rep;
}

/// A_1(x; r) = n_K sum_k (1/k) sum_{p in S_k(x; r)} L(1, chi_{d_k(p)}) log p with
/// d_k(p) = (r^2 - 4p)/k^2, against (pi/2) c_{K,r,1} x.
inline ExperimentReport weighted_L_average(const GaloisFieldSpec& K, i64 r, const ExperimentOptions& opt)
{
    detail::Stopwatch clock;
    const auto cps = normalize_checkpoints(opt.checkpoints);
    if (cps.front() < 7) throw domain_error("weighted_L_average: x must be >= 7");
    const auto split = split_primes_up_to(K, cps.back(), r);
    const auto terms = parallel_map(split.size(), opt.workers, [&](std::size_t i) {
        const i64 p = static_cast<i64>(split[i].p);
        const i64 D = r * r - 4 * p;
        const double logp = std::log(static_cast<double>(p));
        double t = 0.0;
        for (i64 k = 1; k * k <= -D; ++k) {
            if ((-D) % (k * k) != 0) continue;
            const i64 d = D / (k * k);
            if (!is_discriminant(d)) continue;
            t += L1_formula(d) * logp / static_cast<double>(k);
        }
        return t;
    });
    ExperimentReport rep;
    rep.experiment = "a1-average";
    rep.config = {{"field", K.name}, {"r", r}, {"checkpoints", cps}};
    rep.constant = detail::resolve_constant(K, r, opt);
    CompensatedSum s;
    std::size_t idx = 0;
    for (u64 x : cps) {
        while (idx < split.size() && split[idx].p <= x) s.add(terms[idx++]);
        rep.add_row(static_cast<double>(x), K.n_K * s.value(),
                    std::numbers::pi / 2.0 * rep.constant->value * static_cast<double>(x));
    }
    rep.runtime_seconds = clock.seconds();
    return rep;
}

struct ReductionCount {
    u64 exact = 0;
    double main_term = 0.0;         ///< (p-1) V / (p^2 #Aut), or its two-prime analogue
    Rational equidistributed;       ///< (p-1)/#Aut * #B/p^2: exact value for full residue boxes
};

inline void require_box_prime(const GaloisFieldSpec& K, const DegreeFPrime& pr)
{
    if (pr.f != 1) throw domain_error("reduction counts need a degree-1 prime");
    if (pr.p <= 3 || divides_disc(K.disc, pr.p)) throw domain_error("reduction counts need p not dividing 6 disc");
}

/// Models in the box whose reduction at the prime is F_p-isomorphic to the target.
inline ReductionCount count_box_reductions(const GaloisFieldSpec& K, const CurveBox& box, const ReducedCurve& target,
                                           const DegreeFPrime& prime)
{
    box.validate(K.n_K);
    require_box_prime(K, prime);
    const u64 p = prime.p;
    if (target.f() != 1 || target.p() != p) throw domain_error("target must be a curve over F_p for the same p");
    if (is_singular_mod_p(target.a, target.b, p)) throw domain_error("target curve is singular");
    BoxReducer red({prime});
    const auto ha = red.histogram(box.a1, box.b1);
    const auto hb = red.histogram(box.a2, box.b2);
    std::vector<u64> da(p, 0), db(p, 0);
    for (const auto& [v, c] : ha) da[v] = c;
    for (const auto& [v, c] : hb) db[v] = c;
    ReductionCount out;
    for (const auto& [x, y] : isomorphism_orbit(target.a, target.b, p)) out.exact += da[x] * db[y];
    const int aut = aut_size(static_cast<i64>(target.a), static_cast<i64>(target.b), p);
    const double pd = static_cast<double>(p);
    out.main_term = (pd - 1.0) * box.V() / (pd * pd * aut);
    out.equidistributed = Rational(static_cast<i64>(p - 1), aut)
                          * Rational(static_cast<i64>(box.cardinality()), static_cast<i64>(p * p));
    return out;
}

/// Models whose reductions at two primes over distinct rational primes are isomorphic
/// to the respective targets.
inline ReductionCount count_box_reductions_pair(const GaloisFieldSpec& K, const CurveBox& box, const ReducedCurve& target1,
                                                const DegreeFPrime& prime1, const ReducedCurve& target2,
                                                const DegreeFPrime& prime2)
{
    box.validate(K.n_K);
    require_box_prime(K, prime1);
    require_box_prime(K, prime2);
    if (prime1.p == prime2.p) throw domain_error("the two primes must lie over distinct rational primes");
    const u64 p = prime1.p, pp = prime2.p;
    if (target1.p() != p || target2.p() != pp || target1.f() != 1 || target2.f() != 1)
        throw domain_error("targets must live over the residue fields of their primes");
    if (is_singular_mod_p(target1.a, target1.b, p) || is_singular_mod_p(target2.a, target2.b, pp))
        throw domain_error("target curve is singular");
    BoxReducer red({prime1, prime2});
    const auto ha = red.histogram(box.a1, box.b1);
    const auto hb = red.histogram(box.a2, box.b2);
    std::vector<u64> da(p * pp, 0), db(p * pp, 0);
    for (const auto& [v, c] : ha) da[v] = c;
    for (const auto& [v, c] : hb) db[v] = c;
    ReductionCount out;
    const auto o1 = isomorphism_orbit(target1.a, target1.b, p);
    const auto o2 = isomorphism_orbit(target2.a, target2.b, pp);
    for (const auto& [x1, y1] : o1)
        for (const auto& [x2, y2] : o2) out.exact += da[x1 + p * x2] * db[y1 + p * y2];
    const int aut1 = aut_size(static_cast<i64>(target1.a), static_cast<i64>(target1.b), p);
    const int aut2 = aut_size(static_cast<i64>(target2.a), static_cast<i64>(target2.b), pp);
    const double pd = static_cast<double>(p), ppd = static_cast<double>(pp);
    out.main_term = (pd - 1.0) * (ppd - 1.0) * box.V() / (pd * pd * ppd * ppd * aut1 * aut2);
    out.equidistributed = Rational(static_cast<i64>((p - 1) * (pp - 1)), aut1 * aut2)
                          * Rational(static_cast<i64>(box.cardinality()), static_cast<i64>(p * p * pp * pp));
    return out;
}

/// theta_K(x; 1, q, a): sum of log N(P) over degree-1 primes with N(P) <= x and
/// N(P) = a mod q (n_K primes above each split p), against x / phi_K(q), phi_K(q) = #G_q.
inline ExperimentReport theta_K(const GaloisFieldSpec& K, u64 q, u64 a, const ExperimentOptions& opt,
                                u64 residue_budget = default_abelian_budget)
{
    detail::Stopwatch clock;
    if (q < 1 || std::gcd(a, q) != 1) throw domain_error("theta_K: need gcd(a, q) = 1");
    const auto cps = normalize_checkpoints(opt.checkpoints);
    const auto G = empirical_norm_residues(K, q, std::max(residue_budget, 100 * q), nullptr);
    const u64 ar = a % q;
    const bool in_G = q == 1 || std::binary_search(G.begin(), G.end(), ar);
    const double phi_K = static_cast<double>(q == 1 ? 1 : G.size());
    std::vector<u64> ps;
    for (u64 p : primes_up_to(cps.back()))
        if (p % q == ar && splits_completely(K, p)) ps.push_back(p);
    ExperimentReport rep;
    rep.experiment = "theta";
    rep.config = {{"field", K.name}, {"q", q}, {"a", a}, {"checkpoints", cps}};
    rep.extra = {{"G_q", G}, {"phi_K_q", static_cast<u64>(phi_K)}, {"a_in_G_q", in_G}};
    CompensatedSum s;
    std::size_t idx = 0;
    for (u64 x : cps) {
        while (idx < ps.size() && ps[idx] <= x) s.add(K.n_K * std::log(static_cast<double>(ps[idx++])));
        rep.add_row(static_cast<double>(x), s.value(), in_G ? std::optional<double>(static_cast<double>(x) / phi_K) : std::nullopt);
    }
    rep.runtime_seconds = clock.seconds();
    return rep;
}

/// Checks the exact Deuring identity mass(p, r) = H(r^2 - 4p)/2 for 5 <= p <= pmax.
struct DeuringCheck {
    u64 primes = 0;
    u64 pairs = 0;
    u64 mismatches = 0;
    std::vector<nlohmann::json> failures;
};

inline DeuringCheck deuring_check(u64 pmax, unsigned workers = 1)
{
    std::vector<u64> ps;
    for (u64 p : primes_up_to(pmax))
        if (p >= 5) ps.push_back(p);
    auto per = parallel_map(ps.size(), workers, [&](std::size_t i) {
        const u64 p = ps[i];
        const auto hist = trace_histogram(p);
        std::vector<nlohmann::json> bad;
        u64 pairs = 0;
        for (i64 r = -static_cast<i64>(isqrt(4 * p)); r * r < static_cast<i64>(4 * p); ++r) {
            if (r * r >= static_cast<i64>(4 * p)) continue;
            ++pairs;
            const auto it = hist.by_trace.find(r);
            const Rational mass(it == hist.by_trace.end() ? 0 : static_cast<i64>(it->second), static_cast<i64>(p - 1));
            const Rational expected = hurwitz_H(r * r - 4 * static_cast<i64>(p)) / Rational(2);
            if (mass != expected) bad.push_back({{"p", p}, {"r", r}, {"mass", mass.str()}, {"H_half", expected.str()}});
        }
        return std::make_pair(pairs, bad);
    });
    DeuringCheck out;
    out.primes = ps.size();
    for (auto& [pairs, bad] : per) {
        out.pairs += pairs;
        out.mismatches += bad.size();
        for (auto& b : bad) out.failures.push_back(std::move(b));
    }
    return out;
}

} // namespace ltavg
