// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only N,...] [--expect-fail N,...]
//
// Exit status is 0 iff the set of failing criteria equals the --expect-fail set
// (empty by default), so a criterion known to be unattainable still prints FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "ltavg/ltavg.hpp"

using namespace ltavg;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::set<int> parse_set(const std::string& s)
{
    std::set<int> out;
    for (i64 v : parse_int_vector(s)) out.insert(static_cast<int>(v));
    return out;
}

std::string fmt(double v, int prec = 6)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

const GaloisFieldSpec& field(const std::string& name)
{
    static std::map<std::string, GaloisFieldSpec> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, preset_field(name)).first;
    return it->second;
}

ExperimentOptions opts(std::vector<u64> cps, unsigned workers)
{
    ExperimentOptions o;
    o.checkpoints = std::move(cps);
    o.workers = workers;
    return o;
}

// Reduced forms of discriminant D, primitive or not, weighted 1/2 and 1/3 at the
// two special classes.
Rational all_forms_H(i64 D)
{
    Rational total;
    const i64 n = -D;
    for (i64 a = 1; 3 * a * a <= n; ++a)
        for (i64 b = -a + 1; b <= a; ++b) {
            const i64 num = b * b + n;
            if (num % (4 * a) != 0) continue;
            const i64 c = num / (4 * a);
            if (c < a || (c == a && b < 0)) continue;
            if (b == 0 && a == c)
                total += Rational(1, 2);
            else if (b == a && a == c)
                total += Rational(1, 3);
            else
                total += Rational(1);
        }
    return total;
}

const std::vector<std::pair<std::string, i64>> cross_method_cases = {
    {"Q", 1}, {"Q", 2}, {"Q", 3}, {"Q_i", 1}, {"Q_zeta3", 1}};

std::vector<ConstantEstimate> sums_at(u64 K, u64 N, unsigned workers)
{
    std::vector<ConstantEstimate> out;
    for (const auto& [name, r] : cross_method_cases) out.push_back(constant_sum(field(name), r, K, N, workers));
    return out;
}

Outcome deuring()
{
    u64 pairs = 0, bad = 0;
    for (u64 p : primes_up_to(199)) {
        if (p < 5) continue;
        for (i64 r = -static_cast<i64>(isqrt(4 * p)); r * r < static_cast<i64>(4 * p); ++r) {
            if (r * r >= static_cast<i64>(4 * p)) continue;
            ++pairs;
            if (isogeny_mass_oracle(p, r) != hurwitz_H(r * r - 4 * static_cast<i64>(p)) / Rational(2)) ++bad;
        }
    }
    return {bad == 0, std::to_string(pairs) + " (p, r) pairs, " + std::to_string(bad) + " mismatches"};
}

Outcome class_numbers()
{
    u64 checked = 0, bad = 0;
    for (i64 D = -3; D >= -2000; --D) {
        if (!is_discriminant(D)) continue;
        ++checked;
        if (hurwitz_H(D) != all_forms_H(D)) ++bad;
    }
    const bool spots = hurwitz_H(-3) == Rational(1, 3) && hurwitz_H(-4) == Rational(1, 2) && hurwitz_H(-12) == Rational(4, 3)
                       && hurwitz_H(-16) == Rational(3, 2);
    return {bad == 0 && spots, std::to_string(checked) + " discriminants, " + std::to_string(bad) + " mismatches, spot values "
                                   + (spots ? "ok" : "wrong")};
}

Outcome l_values()
{
    double worst = 0.0;
    u64 n = 0;
    for (i64 d = -3; d >= -1000; --d) {
        if (!is_fundamental(d)) continue;
        ++n;
        worst = std::max(worst, std::fabs(L1_series(d, 1e-4) - L1_formula(d)));
    }
    return {worst < 2e-4, std::to_string(n) + " fundamental d, max |series - formula| = " + fmt(worst)};
}

Outcome cross_method(std::vector<std::string>& bodies)
{
    const auto sums = sums_at(default_K_max, default_N_max, 1);
    const auto sums2 = sums_at(2 * default_K_max, 2 * default_N_max, 1);
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const auto& [name, r] = cross_method_cases[i];
        const auto prod = constant_product(field(name), r, default_L_max);
        const auto prod2 = constant_product(field(name), r, 2 * default_L_max);
        const double gap = std::fabs(sums[i].value - prod.value) / prod.value;
        const double gap2 = std::fabs(sums2[i].value - prod2.value) / prod2.value;
        pass = pass && gap < 0.01 && gap2 < gap;
        detail += (i ? "; " : "") + name + " r=" + std::to_string(r) + " gap " + fmt(100 * gap, 3) + "% -> " + fmt(100 * gap2, 3) + "%";
        bodies.push_back(to_json(sums[i]).dump());
    }
    return {pass, detail};
}

Outcome f2_totality()
{
    u64 inputs = 0, none = 0, several = 0, out_of_range = 0;
    std::string example;
    for (i64 r = -12; r <= 12; ++r)
        for (u64 m = 1; m <= 64; ++m)
            for (i64 b = 1; b <= static_cast<i64>(m); ++b) {
                if (std::gcd(static_cast<u64>(b), m) != 1) continue;
                ++inputs;
                int fired = 0;
                for (const auto& row : F2_rows(r, b, m)) {
                    if (!row.fires) continue;
                    ++fired;
                    if (!(row.value > Rational(0) && row.value <= Rational(2))) ++out_of_range;
                }
                if (fired == 0) {
                    ++none;
                    if (example.empty()) example = " (first: r=" + std::to_string(r) + " b=" + std::to_string(b) + " m=" + std::to_string(m) + ")";
                }
                if (fired > 1) ++several;
            }
    return {none == 0 && several == 0 && out_of_range == 0,
            std::to_string(inputs) + " inputs, no guard: " + std::to_string(none) + example + ", several guards: "
                + std::to_string(several) + ", value outside (0,2]: " + std::to_string(out_of_range)};
}

Outcome hurwitz_convergence(unsigned workers, std::vector<std::string>& bodies)
{
    const auto rep = hurwitz_prime_sum(field("Q"), 1, opts({1000, 100000}, workers));
    const double r3 = *rep.rows[0].ratio, r5 = *rep.rows[1].ratio;
    bodies.push_back(report_body(rep).dump());
    return {r5 >= 0.9 && r5 <= 1.1 && std::fabs(r5 - 1) < std::fabs(r3 - 1),
            "ratio at 1e3 = " + fmt(r3) + ", at 1e5 = " + fmt(r5)};
}

Outcome a1_convergence()
{
    const auto rep = weighted_L_average(field("Q"), 1, opts({100000}, 1));
    const double ratio = *rep.rows[0].ratio;
    bool symmetric = true;
    for (i64 r : {1, 2, 3})
        symmetric = symmetric && weighted_L_average(field("Q"), r, opts({10000}, 1)).rows[0].empirical
                                     == weighted_L_average(field("Q"), -r, opts({10000}, 1)).rows[0].empirical;
    return {ratio >= 0.85 && ratio <= 1.15 && symmetric,
            "A_1 ratio at 1e5 = " + fmt(ratio) + ", symmetry r <-> -r " + (symmetric ? "exact" : "broken")};
}

Outcome box_average_q(unsigned workers, std::vector<std::string>& bodies)
{
    const auto rep = box_average(field("Q"), parse_box("a1=(0);b1=(15);a2=(0);b2=(15)"), 1, 1, opts({10000}, workers));
    const double ratio = *rep.rows[0].ratio;
    bodies.push_back(report_body(rep).dump());
    return {ratio >= 0.9 && ratio <= 1.1, "average " + fmt(rep.rows[0].empirical) + ", ratio " + fmt(ratio)};
}

Outcome exact_reductions()
{
    std::mt19937_64 rng(2024);
    u64 checked = 0, bad = 0;
    for (u64 p : {11ULL, 13ULL}) {
        const std::string h = std::to_string(p / 2);
        // radius p/2 around 0 covers each residue once
        const auto box = parse_box("a1=(0);b1=(" + h + ");a2=(0);b2=(" + h + ")");
        const FiniteField F(p);
        for (int t = 0; t < 20;) {
            const u64 a = rng() % p, b = rng() % p;
            if (is_singular_mod_p(a, b, p)) continue;
            ++t;
            ++checked;
            const auto c = count_box_reductions(field("Q"), box, ReducedCurve{F, a, b}, degree_one_prime(p, 0));
            if (Rational(static_cast<i64>(c.exact)) != c.equidistributed) ++bad;
        }
    }
    return {bad == 0, std::to_string(checked) + " targets, " + std::to_string(bad) + " mismatches"};
}

Outcome f3_bounded()
{
    const auto rep = box_average(field("Q"), parse_box("a1=(0);b1=(10);a2=(0);b2=(10)"), 1, 3, opts({1000, 3000}, 1));
    const double v1 = rep.rows[0].empirical, v2 = rep.rows[1].empirical;
    return {v1 < 2 && v2 < 2, "averages " + fmt(v1) + " (1e3), " + fmt(v2) + " (3e3); Q has no degree-3 primes"};
}

Outcome theta_sanity()
{
    bool pass = true;
    std::string detail;
    for (u64 q : {3ULL, 4ULL, 5ULL}) {
        const auto G = empirical_norm_residues(field("Q_i"), q, default_abelian_budget, nullptr);
        for (u64 a : G) {
            const auto rep = theta_K(field("Q_i"), q, a, opts({100000}, 1));
            const double ratio = *rep.rows[0].ratio;
            pass = pass && std::fabs(ratio - 1) <= 0.10;
            detail += (detail.empty() ? "" : ", ") + std::string("q=") + std::to_string(q) + " a=" + std::to_string(a) + ": " + fmt(ratio, 4);
        }
    }
    return {pass, "theta / (x / phi_K(q)) at 1e5: " + detail};
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> only, expect_fail;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--only")
            only = parse_set(argv[i + 1]);
        else if (flag == "--expect-fail")
            expect_fail = parse_set(argv[i + 1]);
        else {
            std::cerr << "usage: acceptance [--only N,...] [--expect-fail N,...]\n";
            return 2;
        }
    }
    std::vector<std::string> det1, det2, det3, det4;
    const std::vector<std::tuple<int, std::string, double, std::function<Outcome()>>> criteria = {
        {1, "Deuring exactness", 60, deuring},
        {2, "class-number oracle", 30, class_numbers},
        {3, "L-value cross-check", 60, l_values},
        {4, "constant cross-method", 300, [&] { return cross_method(det1); }},
        {5, "F_2 table totality", 10, f2_totality},
        {6, "class-number prime sum convergence", 300, [&] { return hurwitz_convergence(1, det2); }},
        {7, "A_1 convergence", 300, a1_convergence},
        {8, "box average", 600, [&] { return box_average_q(1, det3); }},
        {9, "exact reduction counts", 60, exact_reductions},
        {10, "f >= 3 boundedness", 300, f3_bounded},
        {11, "theta_K sanity", 300, theta_sanity},
        {12, "determinism across worker counts", 1200, [&] {
             if (det1.empty() || det2.empty() || det3.empty())
                 return Outcome{false, "needs criteria 4, 6 and 8 in the same run"};
             for (const auto& s : sums_at(default_K_max, default_N_max, 3)) det4.push_back(to_json(s).dump());
             std::vector<std::string> d2, d3;
             hurwitz_convergence(3, d2);
             box_average_q(3, d3);
             const bool same = det4 == det1 && d2 == det2 && d3 == det3;
             return Outcome{same, std::string("report bodies with 1 and 3 workers ") + (same ? "identical" : "differ")};
         }}};

    std::set<int> failed;
    for (const auto& [id, name, budget, fn] : criteria) {
        if (!only.empty() && !only.count(id) && !(id == 12 && only.count(12))) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= budget;
        const bool pass = o.pass && in_time;
        if (!pass) failed.insert(id);
        std::cout << (pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << " [" << fmt(secs, 3) << " s"
                  << (in_time ? "" : ", over the " + fmt(budget) + " s budget") << "]" << std::endl;
    }
    if (!expect_fail.empty()) {
        std::set<int> expected;
        for (int id : expect_fail)
            if (only.empty() || only.count(id)) expected.insert(id);
        std::cout << "expected failures: " << expect_fail.size() << ", observed failures: " << failed.size() << '\n';
        return failed == expected ? 0 : 1;
    }
    return failed.empty() ? 0 : 1;
}
