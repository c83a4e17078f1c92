#include <gtest/gtest.h>

#include <random>

#include "ltavg/numberfield.hpp"

using namespace ltavg;

namespace {

// Product of two power-basis elements in Z[x]/(poly), poly monic.
std::vector<i64> multiply_in_field(const std::vector<i64>& x, const std::vector<i64>& y, const PolyZ& poly)
{
    const std::size_t n = poly.size() - 1;
    std::vector<i64> prod(2 * n - 1, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) prod[i + j] += x[i] * y[j];
    for (std::size_t d = prod.size(); d-- > n;) {
        const i64 c = prod[d];
        prod[d] = 0;
        for (std::size_t k = 0; k < n; ++k) prod[d - n + k] -= c * poly[k];
    }
    prod.resize(n);
    return prod;
}

const GaloisFieldSpec& Qi()
{
    static const auto K = preset_field("Q_i");
    return K;
}

} // namespace

TEST(ParseField, RationalField)
{
    const auto K = preset_field("Q");
    EXPECT_EQ(K.n_K, 1);
    EXPECT_EQ(K.m_K, 1u);
    EXPECT_EQ(K.n_A, 1u);
    EXPECT_EQ(K.G_mK, std::vector<u64>{1});
}

TEST(ParseField, GaussianField)
{
    EXPECT_EQ(Qi().n_K, 2);
    EXPECT_EQ(Qi().disc, -4);
    EXPECT_EQ(Qi().m_K, 4u);
    EXPECT_EQ(Qi().n_A, 2u);
    EXPECT_EQ(Qi().G_mK, std::vector<u64>{1});
}

TEST(ParseField, RealQuadratic)
{
    const auto K = preset_field("Q_sqrt2");
    EXPECT_EQ(K.m_K, 8u);
    EXPECT_EQ(K.n_A, 2u);
    EXPECT_EQ(K.G_mK, (std::vector<u64>{1, 7}));
}

TEST(ParseField, CyclotomicAndS3)
{
    const auto Z5 = preset_field("Q_zeta5");
    EXPECT_EQ(Z5.m_K, 5u);
    EXPECT_EQ(Z5.n_A, 4u);
    EXPECT_EQ(Z5.G_mK, std::vector<u64>{1});
    const auto S3 = preset_field("S3_x3m2");
    EXPECT_EQ(S3.n_K, 6);
    EXPECT_EQ(S3.m_K, 3u);
    EXPECT_EQ(S3.n_A, 2u);
    EXPECT_EQ(S3.G_mK, std::vector<u64>{1});
}

TEST(ParseField, Rejections)
{
    EXPECT_THROW(parse_field({-1, 0, 1}), domain_error); // x^2 - 1 reducible
    EXPECT_THROW(parse_field({1, 0, 2}), domain_error);  // not monic
    EXPECT_THROW(parse_field({1, 0, 1}, FieldOverrides{4, std::nullopt, std::nullopt}), domain_error);
    EXPECT_THROW(load_field("no_such_field"), std::invalid_argument);
    const auto K = parse_field({1, 0, 1}, FieldOverrides{4, 2, std::vector<u64>{1}});
    EXPECT_EQ(K.m_K_source, DataSource::user_supplied);
}

TEST(ParseField, JsonRoundTrip)
{
    const auto j = field_to_json(Qi());
    const auto back = field_from_json(j);
    EXPECT_EQ(back.poly, Qi().poly);
    EXPECT_EQ(back.m_K, Qi().m_K);
    EXPECT_EQ(back.G_mK, Qi().G_mK);
}

TEST(Primes, RootsAndSplitting)
{
    EXPECT_EQ(poly_roots_mod_p({1, 0, 1}, 5), (std::vector<u64>{2, 3}));
    EXPECT_TRUE(poly_roots_mod_p({1, 0, 1}, 7).empty());
    EXPECT_EQ(poly_roots_mod_p({0, 1}, 101), std::vector<u64>{0});
    std::vector<u64> ps;
    for (const auto& sp : split_primes_up_to(Qi(), 30, 1)) ps.push_back(sp.p);
    EXPECT_EQ(ps, (std::vector<u64>{13, 17, 29}));
    ps.clear();
    for (const auto& sp : split_primes_up_to(preset_field("Q"), 10, 0)) ps.push_back(sp.p);
    EXPECT_EQ(ps, std::vector<u64>{7});
    EXPECT_TRUE(split_primes_up_to(preset_field("Q"), 4, 1).empty());
}

TEST(Primes, SplitFilterUsesHasseBound)
{
    // r = 5: B(r) = max(5, 25/4) so 7 is the first admissible prime
    const auto sp = split_primes_up_to(preset_field("Q"), 20, 5);
    ASSERT_FALSE(sp.empty());
    EXPECT_EQ(sp.front().p, 7u);
    const auto sp9 = split_primes_up_to(preset_field("Q"), 30, 9);
    ASSERT_FALSE(sp9.empty());
    EXPECT_EQ(sp9.front().p, 23u);
}

TEST(Primes, DegreeF)
{
    const auto inert = degree_f_primes(Qi(), 7, 2, nullptr);
    ASSERT_EQ(inert.size(), 1u);
    EXPECT_EQ(inert[0].modulus_poly, (PolyP{1, 0, 1}));
    EXPECT_EQ(inert[0].norm(), 49u);
    EXPECT_TRUE(degree_f_primes(Qi(), 13, 2, nullptr).empty());
    EXPECT_EQ(degree_f_primes(preset_field("Q"), 11, 1, nullptr).size(), 1u);
}

TEST(NormResidues, Examples)
{
    EXPECT_EQ(empirical_norm_residues(Qi(), 4, 10000, nullptr), std::vector<u64>{1});
    EXPECT_EQ(empirical_norm_residues(preset_field("Q"), 12, 10000, nullptr), (std::vector<u64>{1, 5, 7, 11}));
    EXPECT_EQ(empirical_norm_residues(preset_field("S3_x3m2"), 3, 100000, nullptr), std::vector<u64>{1});
    EXPECT_TRUE(is_subgroup_of_units({1, 7}, 8));
    EXPECT_FALSE(is_subgroup_of_units({1, 3}, 8) && is_subgroup_of_units({1, 3, 5}, 8));
}

TEST(Reduction, Examples)
{
    const auto P13 = degree_one_prime(13, 5);
    EXPECT_EQ(reduce_element(std::vector<i64>{5, 0}, P13), 5u);
    EXPECT_EQ(reduce_element(std::vector<i64>{0, 1}, P13), 5u);
    const auto P7 = degree_f_primes(Qi(), 7, 2, nullptr).at(0);
    const auto F = P7.residue_field();
    EXPECT_EQ(reduce_element(std::vector<i64>{1, 1}, P7), F.from_coeffs(PolyP{1, 1}));
}

TEST(Reduction, IsRingHomomorphism)
{
    std::mt19937_64 rng(11);
    for (const char* name : {"Q_i", "Q_zeta3", "Q_zeta5", "S3_x3m2"}) {
        const auto K = preset_field(name);
        const std::size_t n = static_cast<std::size_t>(K.n_K);
        std::vector<DegreeFPrime> primes;
        for (const auto& sp : split_primes_up_to(K, 400, 1))
            for (u64 root : sp.roots) primes.push_back(degree_one_prime(sp.p, root));
        for (u64 p : {7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL})
            for (int f = 2; f <= K.n_K; ++f)
                if (!divides_disc(K.disc, p))
                    for (auto& pr : degree_f_primes(K, p, f, nullptr)) primes.push_back(pr);
        ASSERT_FALSE(primes.empty()) << name;
        for (int t = 0; t < 30; ++t) {
            std::vector<i64> x(n), y(n), s(n);
            for (std::size_t j = 0; j < n; ++j) {
                x[j] = static_cast<i64>(rng() % 41) - 20;
                y[j] = static_cast<i64>(rng() % 41) - 20;
                s[j] = x[j] + y[j];
            }
            const auto xy = multiply_in_field(x, y, K.poly);
            for (const auto& pr : primes) {
                const auto F = pr.residue_field();
                const auto rx = reduce_element(x, pr), ry = reduce_element(y, pr);
                ASSERT_EQ(reduce_element(s, pr), F.add(rx, ry)) << name;
                ASSERT_EQ(reduce_element(xy, pr), F.mul(rx, ry)) << name << " p=" << pr.p << " f=" << pr.f;
            }
        }
    }
}
