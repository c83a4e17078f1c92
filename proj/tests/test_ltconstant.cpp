#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <map>
#include <random>

#include "ltavg/ltconstant.hpp"

using namespace ltavg;

namespace {

const GaloisFieldSpec& field(const std::string& name)
{
    static std::map<std::string, GaloisFieldSpec> cache;
    auto it = cache.find(name);
    if (it == cache.end()) it = cache.emplace(name, preset_field(name)).first;
    return it->second;
}

// The 2-adic Euler factor of the sum form, phi(2^om) * sum_{e,v} L_2(e,v) / (2^{e+v} phi(2^max(om, e+2v))),
// truncated at e < E, v < V (terms decay like 2^-(e+v)).
long double two_adic_factor(i64 r, i64 b, u64 m, int E = 15, int V = 8)
{
    const CoefficientEngine eng(r, b, m);
    const int om = valuation(static_cast<i64>(m), 2);
    auto phi2 = [](int e) { return e == 0 ? 1.0L : std::ldexp(1.0L, e - 1); };
    long double s = 0;
    for (int e = 0; e < E; ++e)
        for (int v = 0; v < V; ++v) {
            const i64 L = eng.local(2, e, v);
            if (L) s += static_cast<long double>(L) / (std::ldexp(1.0L, e + v) * phi2(std::max(om, e + 2 * v)));
        }
    return s * phi2(om);
}

} // namespace

TEST(Coefficient, KnownValues)
{
    EXPECT_EQ(c_coefficient(1, 1, 1, 1, 1), 1);
    EXPECT_EQ(c_coefficient(1, 2, 1, 1, 1), -1);
    for (u64 k = 2; k <= 12; k += 2)
        for (u64 n = 1; n <= 12; ++n) EXPECT_EQ(c_coefficient(k, n, 3, 1, 1), 0);
}

TEST(Coefficient, FactorizedMatchesDefinition)
{
    std::mt19937_64 rng(5);
    const u64 moduli[] = {1, 3, 4, 5, 8, 12, 15, 16, 24, 40};
    for (int t = 0; t < 1500; ++t) {
        const u64 m = moduli[rng() % 10];
        i64 b;
        do b = static_cast<i64>(rng() % (2 * m + 5)) + 1;
        while (std::gcd(static_cast<u64>(b), m) != 1);
        const i64 r = static_cast<i64>(rng() % 13) - 6;
        const u64 k = 1 + rng() % 12, n = 1 + rng() % 60;
        const CoefficientEngine eng(r, b, m);
        ASSERT_EQ(eng.coefficient(k, n), c_coefficient(k, n, r, b, m)) << k << " " << n << " " << r << " " << b << " " << m;
    }
}

TEST(Coefficient, DependsOnlyOnClassOfB)
{
    for (u64 k = 1; k <= 6; ++k)
        for (u64 n = 1; n <= 30; ++n) EXPECT_EQ(c_coefficient(k, n, 2, 1, 8), c_coefficient(k, n, 2, 9, 8));
}

TEST(F2, KnownValues)
{
    EXPECT_EQ(F2_local(1, 5, 16), Rational(2, 3));
    EXPECT_EQ(F2_local(2, 1, 1), Rational(4, 3));
    EXPECT_EQ(F2_local(0, 3, 4), Rational(5, 3));
    EXPECT_THROW(F2_local(0, 2, 4), domain_error);
}

TEST(F2, MatchesGenericFactorsWhenMIsOne)
{
    // odd r: l(l^2-l-1)/((l+1)(l-1)^2) at l = 2; r = 2 mod 4: l^2/(l^2-1) at l = 2
    EXPECT_EQ(F2_local(3, 1, 1), Rational(2 * (4 - 2 - 1), 3 * 1));
    EXPECT_EQ(F2_local(6, 1, 1), Rational(4, 3));
}

TEST(F2, LiteralTableHasUncoveredInputs)
{
    // r = 2 mod 4, ord_2 m > ord_2 D even, D / 2^ord_2 D = 7 mod 8: no literal-table guard fires.
    EXPECT_THROW(F2_local(2, 5, 32), std::logic_error);
    EXPECT_EQ(F2_local(2, 5, 32, F2Table::corrected), Rational(3, 2));
}

TEST(F2, CorrectedTableMatchesTwoAdicEulerFactor)
{
    int literal_disagreements = 0;
    for (i64 r = -12; r <= 12; ++r)
        for (u64 m = 1; m <= 64; m *= 2)
            for (i64 b = 1; b <= static_cast<i64>(m); b += (m == 1 ? 1 : 2)) {
                const long double euler = two_adic_factor(r, b, m);
                const Rational fixed = F2_local(r, b, m, F2Table::corrected);
                ASSERT_NEAR(static_cast<double>(euler), fixed.to_double(), 2e-4) << r << " " << b << " " << m;
                EXPECT_GT(fixed, Rational(0));
                EXPECT_LE(fixed, Rational(2));
                try {
                    if (std::fabs(F2_local(r, b, m).to_double() - static_cast<double>(euler)) > 2e-4) ++literal_disagreements;
                } catch (const std::logic_error&) {
                    ++literal_disagreements;
                }
            }
    EXPECT_EQ(literal_disagreements, 30); // row-4 values and the uncovered class
}

TEST(FiniteProduct, Examples)
{
    EXPECT_EQ(F_finite_product(1, 1, 1), F2_local(1, 1, 1));
    EXPECT_EQ(F_finite_product(1, 1, 4), Rational(2, 3));
    EXPECT_EQ(F_finite_product(1, 1, 3), Rational(3, 4)); // 2/3 * 9/8
}

TEST(PiHalf, FrozenValues)
{
    EXPECT_EQ(pi_half(2.0), 0.0);
    EXPECT_THROW(pi_half(1.5), domain_error);
    EXPECT_NEAR(pi_half(100), 3.134485165308584882, 3.2e-9);
    EXPECT_NEAR(pi_half(1e4), 15.114756204954750876, 1.6e-8);
    EXPECT_NEAR(pi_half(1e5), 35.634450811407430459, 3.6e-8);
    EXPECT_NEAR(pi_half(1e6), 88.856514407991049257, 8.9e-8);
}

TEST(PiHalf, AsymptoticApproach)
{
    double prev = 10.0;
    for (double x : {1e6, 1e9, 1e12}) {
        const double ratio = pi_half(x) * std::log(x) / std::sqrt(x);
        EXPECT_GT(ratio, 1.0);
        EXPECT_LT(ratio, prev);
        prev = ratio;
    }
}

TEST(ConstantProduct, RationalFieldStructure)
{
    const auto c = constant_product(field("Q"), 1, 10000);
    long double prod = 2.0L / std::numbers::pi_v<long double> * 2.0L / 3.0L;
    for (u64 l : primes_up_to(10000))
        if (l > 2) {
            const long double L = l;
            prod *= L * (L * L - L - 1) / ((L + 1) * (L - 1) * (L - 1));
        }
    EXPECT_NEAR(c.value, static_cast<double>(prod), 1e-13);
    EXPECT_EQ(c.method, ConstantMethod::product);
}

TEST(ConstantProduct, DoublingStaysWithinTail)
{
    for (i64 r : {0, 1, 2, 3}) {
        const auto a = constant_product(field("Q"), r, 50000);
        const auto b = constant_product(field("Q"), r, 100000);
        EXPECT_LT(std::fabs(a.value - b.value), a.tail_estimate) << r;
    }
}

TEST(ConstantProduct, GaussianMatchesRationalAtOddR)
{
    // Q(i): n_A = 2, phi(4) = 2, single class b = 1 with F = 2/3: same as Q.
    EXPECT_NEAR(constant_product(field("Q_i"), 1).value, constant_product(field("Q"), 1).value, 1e-15);
}

TEST(ConstantSum, EvenKVanishForOddR)
{
    const CoefficientEngine eng(1, 1, 1);
    for (u64 k = 2; k <= 40; k += 2)
        for (u64 n = 1; n <= 50; ++n) EXPECT_EQ(eng.coefficient(k, n), 0);
}

TEST(ConstantSum, AgreesWithProductForQ)
{
    const auto s = constant_sum(field("Q"), 1, 60, 1500);
    const auto p = constant_product(field("Q"), 1);
    EXPECT_LT(std::fabs(s.value - p.value) / p.value, 0.03);
    EXPECT_GT(s.tail_estimate, 0.0);
}

TEST(ConstantSum, DoublingStaysWithinTail)
{
    const auto a = constant_sum(field("Q"), 1, 60, 1500);
    const auto b = constant_sum(field("Q"), 1, 120, 3000);
    EXPECT_LT(std::fabs(a.value - b.value), a.tail_estimate);
    EXPECT_LT(a.tail_estimate, 0.05 * a.value);
}

TEST(ConstantSum, GaussianStableUnderDoubling)
{
    const auto a = constant_sum(field("Q_i"), 1, 100, 2500);
    const auto b = constant_sum(field("Q_i"), 1, 200, 5000);
    EXPECT_GT(a.value, 0.0);
    EXPECT_LT(std::fabs(a.value - b.value) / b.value, 5e-3); // agree to 3 significant digits
}

TEST(ConstantSum, WorkerCountDoesNotChangeValue)
{
    const auto a = constant_sum(field("Q_zeta3"), 1, 40, 800, 1);
    const auto b = constant_sum(field("Q_zeta3"), 1, 40, 800, 3);
    EXPECT_EQ(a.value, b.value);
}

TEST(ConstantEstimate, JsonCarriesProvenance)
{
    const auto j = to_json(constant_product(field("Q"), 1, 1000));
    EXPECT_EQ(j.at("method"), "product");
    EXPECT_EQ(j.at("truncations").at("L_max"), 1000);
    EXPECT_EQ(j.at("truncations").at("f2_table"), "literal");
    EXPECT_TRUE(j.contains("tail_estimate"));
}
