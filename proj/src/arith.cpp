#include "cdeg/arith.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace cdeg::arith {

u64 powmod(u64 base, u64 exp, u64 m)
{
    if (m == 1)
        return 0;
    u64 result = 1;
    base %= m;
    while (exp) {
        if (exp & 1)
            result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

u64 invmod(u64 a, u64 m)
{
    i128 old_r = static_cast<i128>(a % m), r = m;
    i128 old_s = 1, s = 0;
    while (r != 0) {
        i128 q = old_r / r;
        std::tie(old_r, r) = std::pair<i128, i128>(r, old_r - q * r);
        std::tie(old_s, s) = std::pair<i128, i128>(s, old_s - q * s);
    }
    if (old_r != 1)
        throw PreconditionError("invmod: element not invertible");
    return reduce(old_s, m);
}

bool is_prime(u64 m)
{
    if (m < 2)
        throw PreconditionError("is_prime: input must be >= 2");
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (m % p == 0)
            return m == p;
    }
    u64 d = m - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // this base set is a proven witness set below 2^64
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        a %= m;
        if (a == 0)
            continue;
        u64 x = powmod(a, d, m);
        if (x == 1 || x == m - 1)
            continue;
        bool composite = true;
        for (unsigned i = 1; i < s; ++i) {
            x = mulmod(x, x, m);
            if (x == m - 1) {
                composite = false;
                break;
            }
        }
        if (composite)
            return false;
    }
    return true;
}

namespace {

u64 rho(u64 n, std::mt19937_64 & rng)
{
    if (n % 2 == 0)
        return 2;
    for (;;) {
        u64 y = rng() % n, c = rng() % (n - 1) + 1, m = 128;
        u64 g = 1, q = 1, r = 1, x = 0, ys = 0;
        auto f = [&](u64 v) { return (mulmod(v, v, n) + c) % n; };
        do {
            x = y;
            for (u64 i = 0; i < r; ++i)
                y = f(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n)
            return g;
    }
}

void split(u64 n, std::mt19937_64 & rng, std::map<u64, unsigned> & out)
{
    if (n == 1)
        return;
    if (is_prime(n)) {
        ++out[n];
        return;
    }
    u64 d = rho(n, rng);
    split(d, rng, out);
    split(n / d, rng, out);
}

} // namespace

Factorization factor(u64 m, u64 seed)
{
    if (m == 0)
        throw PreconditionError("factor: input must be >= 1");
    std::map<u64, unsigned> found;
    for (u64 p = 2; p < 1000000 && p * p <= m; p += (p == 2 ? 1 : 2)) {
        while (m % p == 0) {
            ++found[p];
            m /= p;
        }
    }
    if (m > 1) {
        std::mt19937_64 rng(seed);
        split(m, rng, found);
    }
    Factorization fac;
    for (auto [p, e] : found)
        fac.push_back({p, e});
    return fac;
}

unsigned valuation(u64 m, u64 p)
{
    unsigned v = 0;
    while (m != 0 && m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

u64 ipow(u64 base, unsigned exp)
{
    u64 r = 1;
    while (exp--)
        r *= base;
    return r;
}

int kronecker(i64 d, u64 p)
{
    if (p == 2) {
        if (d % 2 == 0)
            return 0;
        u64 r = reduce(d, 8);
        return (r == 1 || r == 7) ? 1 : -1;
    }
    u64 a = reduce(d, p);
    if (a == 0)
        return 0;
    return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

u64 least_nonresidue(u64 p)
{
    if (p == 2)
        throw PreconditionError("least_nonresidue: p must be odd");
    for (u64 n = 2;; ++n) {
        if (powmod(n, (p - 1) / 2, p) == p - 1)
            return n;
    }
}

ResidueField ResidueField::prime_field(u64 p)
{
    if (p < 2 || !is_prime(p))
        throw PreconditionError("ResidueField: characteristic must be prime");
    return {p, 1, 0};
}

ResidueField ResidueField::quadratic_extension(u64 p)
{
    if (p < 3 || !is_prime(p))
        throw PreconditionError("ResidueField: F_{p^2} needs an odd prime p");
    if (p > (u64{1} << 31))
        throw PreconditionError("ResidueField: p^2 must fit in 64 bits");
    return {p, 2, least_nonresidue(p)};
}

Fq ResidueField::element(u64 c0, u64 c1) const
{
    if (degree_ == 1 && c1 != 0)
        throw PreconditionError("ResidueField: prime field element with t-component");
    return {c0 % p_, c1 % p_};
}

bool ResidueField::is_canonical(Fq const & x) const
{
    return x.c0 < p_ && x.c1 < p_ && (degree_ == 2 || x.c1 == 0);
}

Fq ResidueField::add(Fq const & x, Fq const & y) const
{
    return {(x.c0 + y.c0) % p_, (x.c1 + y.c1) % p_};
}

Fq ResidueField::neg(Fq const & x) const
{
    return {(p_ - x.c0) % p_, (p_ - x.c1) % p_};
}

Fq ResidueField::sub(Fq const & x, Fq const & y) const
{
    return add(x, neg(y));
}

Fq ResidueField::mul(Fq const & x, Fq const & y) const
{
    if (degree_ == 1)
        return {mulmod(x.c0, y.c0, p_), 0};
    u64 c0 = (mulmod(x.c0, y.c0, p_) + mulmod(mulmod(x.c1, y.c1, p_), n0_, p_)) % p_;
    u64 c1 = (mulmod(x.c0, y.c1, p_) + mulmod(x.c1, y.c0, p_)) % p_;
    return {c0, c1};
}

Fq ResidueField::inv(Fq const & x) const
{
    if (x == zero())
        throw PreconditionError("ResidueField: inverse of zero");
    if (degree_ == 1)
        return {invmod(x.c0, p_), 0};
    // (c0 + c1 t)^-1 = (c0 - c1 t) / (c0^2 - n0 c1^2)
    u64 norm = (mulmod(x.c0, x.c0, p_) + p_ - mulmod(mulmod(x.c1, x.c1, p_), n0_, p_)) % p_;
    u64 ni = invmod(norm, p_);
    return {mulmod(x.c0, ni, p_), mulmod((p_ - x.c1) % p_, ni, p_)};
}

Fq ResidueField::pow(Fq x, u64 e) const
{
    Fq r = one();
    while (e) {
        if (e & 1)
            r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

Fq ResidueField::nth(u64 index) const
{
    return {index % p_, degree_ == 1 ? 0 : index / p_};
}

Fq mod_pow(Fq const & base, u64 exp, ResidueField const & field)
{
    return field.pow(base, exp);
}

unsigned power_residue_level(Fq const & x, u64 ell, unsigned k_max, ResidueField const & field)
{
    u64 q1 = field.order() - 1;
    if (x == field.zero())
        throw PreconditionError("power_residue_level: x must be nonzero");
    if (valuation(q1, ell) < k_max)
        throw PreconditionError("power_residue_level: ell^k_max does not divide Q - 1");
    for (unsigned k = k_max; k > 0; --k) {
        if (field.pow(x, q1 / ipow(ell, k)) == field.one())
            return k;
    }
    return 0;
}

Fq ell_root(Fq const & x, u64 ell, ResidueField const & field)
{
    u64 q1 = field.order() - 1;
    if (x == field.zero())
        return x;
    unsigned e = valuation(q1, ell);
    if (e == 0)
        return field.pow(x, invmod(ell % q1, q1));
    if (field.pow(x, q1 / ell) != field.one())
        throw PreconditionError("ell_root: not an ell-th power");

    u64 ell_e = ipow(ell, e);
    u64 s = q1 / ell_e;
    u64 a = s == 1 ? 0 : invmod(ell % s, s);
    Fq r0 = field.pow(x, a);
    // x / r0^ell lies in the ell-Sylow subgroup
    u64 exp_t = static_cast<u64>((static_cast<u128>(q1) + 1 - static_cast<u128>(a) * ell % q1) % q1);
    Fq target = field.pow(x, exp_t);

    Fq z = field.one();
    for (u64 i = 2;; ++i) {
        z = field.nth(i);
        if (z != field.zero() && field.pow(z, q1 / ell) != field.one())
            break;
    }
    Fq c = field.pow(z, s);
    Fq gamma = field.pow(c, ell_e / ell);
    Fq c_inv = field.inv(c);

    // Pohlig-Hellman in the cyclic group <c> of order ell^e
    u64 d = 0, ell_i = 1;
    for (unsigned i = 0; i < e; ++i) {
        Fq h = field.pow(field.mul(field.pow(c_inv, d), target), ell_e / ell_i / ell);
        u64 digit = 0;
        Fq g = field.one();
        while (g != h) {
            g = field.mul(g, gamma);
            ++digit;
            if (digit >= ell)
                throw PreconditionError("ell_root: discrete log failed");
        }
        d += digit * ell_i;
        ell_i *= ell;
    }
    return field.mul(r0, field.pow(c, d / ell));
}

u64 multiplicative_order(Fq const & x, ResidueField const & field)
{
    if (x == field.zero())
        throw PreconditionError("multiplicative_order: zero has no order");
    u64 q1 = field.order() - 1;
    return order_from_factorization(q1, factor(q1), [&](u64 m) { return field.pow(x, m) == field.one(); });
}

} // namespace cdeg::arith
