#pragma once

#include <cstdint>
#include <vector>

#include "arith.hpp"
#include "polymod.hpp"

namespace ltavg {

/// F_q = F_p[t]/(g) with g monic irreducible of degree f. Elements are encoded as
/// integers in [0, q): the coefficient vector (c_0, ..., c_{f-1}) maps to sum c_i p^i,
/// so for f = 1 an element is simply its residue.
class FiniteField {
public:
    using Elem = u64;

    FiniteField(u64 p, PolyP modulus) : p_(p), modulus_(polymod::make_monic(std::move(modulus), p))
    {
        f_ = polymod::degree(modulus_);
        if (f_ < 1) throw domain_error("FiniteField: modulus must have positive degree");
        q_ = 1;
        for (int i = 0; i < f_; ++i) {
            if (q_ > (u64{1} << 40) / p_) throw domain_error("FiniteField: p^f exceeds 2^40");
            q_ *= p_;
        }
    }

    /// Prime field F_p.
    explicit FiniteField(u64 p) : FiniteField(p, PolyP{0, 1}) {}

    u64 characteristic() const { return p_; }
    int degree() const { return f_; }
    u64 size() const { return q_; }
    const PolyP& modulus() const { return modulus_; }

    Elem zero() const { return 0; }
    Elem one() const { return 1; }

    Elem from_int(i64 v) const { return mod_floor(v, p_); }

    Elem from_coeffs(const PolyP& c) const
    {
        PolyP r = polymod::mod(c, modulus_, p_);
        Elem e = 0;
        for (std::size_t i = r.size(); i-- > 0;) e = e * p_ + r[i];
        return e;
    }

    PolyP to_coeffs(Elem e) const
    {
        PolyP c(static_cast<std::size_t>(f_), 0);
        for (int i = 0; i < f_; ++i) {
            c[static_cast<std::size_t>(i)] = e % p_;
            e /= p_;
        }
        polymod::trim(c);
        return c;
    }

    Elem add(Elem a, Elem b) const
    {
        if (f_ == 1) return (a + b) % p_;
        Elem out = 0, scale = 1;
        for (int i = 0; i < f_; ++i) {
            out += ((a % p_ + b % p_) % p_) * scale;
            a /= p_;
            b /= p_;
            scale *= p_;
        }
        return out;
    }

    Elem neg(Elem a) const
    {
        if (f_ == 1) return (p_ - a) % p_;
        Elem out = 0, scale = 1;
        for (int i = 0; i < f_; ++i) {
            out += ((p_ - a % p_) % p_) * scale;
            a /= p_;
            scale *= p_;
        }
        return out;
    }

    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

    Elem mul(Elem a, Elem b) const
    {
        if (f_ == 1) return mulmod(a, b, p_);
        return from_coeffs(polymod::mul(to_coeffs(a), to_coeffs(b), p_));
    }

    Elem pow(Elem a, u64 e) const
    {
        Elem r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }

    /// Quadratic character by Euler's criterion: a^((q-1)/2).
    int quadratic_character(Elem a) const
    {
        if (a == 0) return 0;
        const Elem e = pow(a, (q_ - 1) / 2);
        return e == one() ? 1 : -1;
    }

    friend bool operator==(const FiniteField& a, const FiniteField& b)
    {
        return a.p_ == b.p_ && a.modulus_ == b.modulus_;
    }

private:
    u64 p_;
    PolyP modulus_;
    int f_ = 1;
    u64 q_ = 1;
};

/// Table of the quadratic character on all of F_q, built by squaring every element.
class CharacterTable {
public:
    explicit CharacterTable(const FiniteField& field) : chi_(field.size(), -1)
    {
        chi_[0] = 0;
        const u64 q = field.size();
        if (field.degree() == 1) {
            const u64 p = field.characteristic();
            for (u64 y = 1; y <= (p - 1) / 2; ++y) chi_[y * y % p] = 1;
            if (p == 2) chi_[1] = 1;
        } else {
            for (u64 y = 1; y < q; ++y) chi_[field.mul(y, y)] = 1;
        }
    }

    int operator()(FiniteField::Elem a) const { return chi_[a]; }
    const std::vector<std::int8_t>& values() const { return chi_; }

private:
    std::vector<std::int8_t> chi_;
};

} // namespace ltavg
