#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ltavg {

/// Raised for mathematically invalid inputs (bad discriminant, singular curve, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

using i64 = std::int64_t;
using u64 = std::uint64_t;
using i128 = __int128;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

inline u64 powmod(u64 base, u64 exp, u64 m)
{
    u64 result = 1 % m;
    base %= m;
    while (exp) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Least nonnegative residue of a modulo m (m > 0).
inline u64 mod_floor(i64 a, u64 m)
{
    i64 r = static_cast<i64>(static_cast<i128>(a) % static_cast<i128>(m));
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline u64 invmod(u64 a, u64 m)
{
    i64 t = 0, new_t = 1;
    i64 r = static_cast<i64>(m), new_r = static_cast<i64>(a % m);
    while (new_r != 0) {
        i64 q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw domain_error("invmod: argument not invertible");
    return mod_floor(t, m);
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
inline bool is_prime(u64 n)
{
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/// All primes <= limit, ascending (sieve of Eratosthenes, odd-only).
inline std::vector<u64> primes_up_to(u64 limit)
{
    std::vector<u64> out;
    if (limit < 2) return out;
    out.push_back(2);
    const u64 half = (limit - 1) / 2; // index i <-> 2i+1, i >= 1
    std::vector<bool> composite(half + 1, false);
    for (u64 i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const u64 p = 2 * i + 1;
        out.push_back(p);
        for (u64 j = (p * p - 1) / 2; j <= half && p * p <= limit; j += p) composite[j] = true;
    }
    return out;
}

/// Smallest-prime-factor table on [0, limit].
class SpfSieve {
public:
    explicit SpfSieve(u64 limit) : spf_(limit + 1, 0)
    {
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] != 0) continue;
            for (u64 j = i; j <= limit; j += i) {
                if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
            }
        }
    }

    u64 limit() const { return spf_.size() - 1; }
    u64 smallest_factor(u64 n) const { return spf_[n]; }

private:
    std::vector<std::uint32_t> spf_;
};

struct PrimePower {
    u64 prime;
    int exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Factorization by trial division, ascending primes.
inline std::vector<PrimePower> factorize(u64 n)
{
    std::vector<PrimePower> out;
    for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

inline std::vector<PrimePower> factorize(u64 n, const SpfSieve& sieve)
{
    if (n > sieve.limit()) return factorize(n);
    std::vector<PrimePower> out;
    while (n > 1) {
        const u64 p = sieve.smallest_factor(n);
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    return out;
}

inline u64 euler_phi(u64 n)
{
    u64 result = n;
    for (const auto& [p, e] : factorize(n)) result = result / p * (p - 1);
    return result;
}

/// Exponent of prime p in n; n == 0 yields a sentinel larger than any real valuation.
inline int valuation(i64 n, u64 p)
{
    constexpr int infinite = 1 << 20;
    if (n == 0) return infinite;
    u64 m = static_cast<u64>(n < 0 ? -n : n);
    int e = 0;
    while (m % p == 0) {
        m /= p;
        ++e;
    }
    return e;
}

inline constexpr int infinite_valuation = 1 << 20;

inline i64 ipow(i64 base, int exp)
{
    i64 r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

inline std::vector<u64> divisors(u64 n)
{
    std::vector<u64> out{1};
    for (const auto& [p, e] : factorize(n)) {
        const std::size_t sz = out.size();
        u64 pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (std::size_t i = 0; i < sz; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline u64 isqrt(u64 n)
{
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

} // namespace ltavg
