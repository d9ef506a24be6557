#include <random>

#include "doctest.h"

#include "cdeg/arith.hpp"

using namespace cdeg;
using namespace cdeg::arith;

namespace {

bool trial_division_prime(u64 m)
{
    if (m < 2)
        return false;
    for (u64 d = 2; d * d <= m; ++d)
        if (m % d == 0)
            return false;
    return true;
}

// Lucas-Lehmer for M = 2^p - 1, p odd prime
bool lucas_lehmer(unsigned p)
{
    u64 m = (u64{1} << p) - 1;
    u64 s = 4;
    for (unsigned i = 0; i < p - 2; ++i)
        s = (mulmod(s, s, m) + m - 2) % m;
    return s == 0;
}

Fq naive_power(Fq x, u64 e, ResidueField const & f)
{
    Fq r = f.one();
    for (u64 i = 0; i < e; ++i)
        r = f.mul(r, x);
    return r;
}

} // namespace

TEST_CASE("mod_pow small values")
{
    auto f7 = ResidueField::prime_field(7);
    CHECK(mod_pow(f7.from_int(2), 0, f7) == f7.one());
    CHECK(mod_pow(f7.from_int(2), 2, f7) == f7.from_int(4));
    CHECK(mod_pow(f7.from_int(2), (7 - 1) / 3, f7) == naive_power(f7.from_int(2), 2, f7));
    CHECK(mod_pow(f7.from_int(2), (7 - 1) / 3, f7) == f7.from_int(4));
}

TEST_CASE("is_prime against trial division and Lucas-Lehmer")
{
    CHECK(is_prime(2));
    CHECK_FALSE(is_prime(561));
    CHECK(trial_division_prime(561) == false);
    for (u64 m = 2; m < 20000; ++m)
        REQUIRE(is_prime(m) == trial_division_prime(m));
    REQUIRE(lucas_lehmer(61));
    CHECK(is_prime((u64{1} << 61) - 1));
    CHECK_FALSE(lucas_lehmer(59));  // 2^59 - 1 is composite
    CHECK_FALSE(is_prime((u64{1} << 59) - 1));
    CHECK_FALSE(is_prime(3215031751ULL));  // strong pseudoprime to bases 2,3,5,7
    CHECK(is_prime(18446744073709551557ULL));
    CHECK_THROWS_AS(is_prime(1), PreconditionError);
}

TEST_CASE("factor")
{
    CHECK(factor(1).empty());
    CHECK(factor(12) == Factorization{{2, 2}, {3, 1}});
    CHECK(factor(2003 * 2011) == Factorization{{2003, 1}, {2011, 1}});

    // above the trial division range: product of two primes near 2^31
    u64 p = 2147483647ULL, q = 2147483629ULL;
    CHECK(factor(p * q) == Factorization{{q, 1}, {p, 1}});

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        u64 m = rng() % 1000000000000ULL + 1;
        u64 prod = 1;
        u64 prev = 0;
        for (auto const & [pr, e] : factor(m)) {
            REQUIRE(pr > prev);
            REQUIRE(e >= 1);
            REQUIRE(is_prime(pr));
            prev = pr;
            prod *= ipow(pr, e);
        }
        REQUIRE(prod == m);
    }
}

TEST_CASE("power_residue_level")
{
    auto f7 = ResidueField::prime_field(7);
    CHECK(power_residue_level(f7.one(), 3, 1, f7) == 1);
    CHECK(power_residue_level(f7.from_int(2), 3, 1, f7) == 0);
    CHECK(power_residue_level(f7.from_int(6), 3, 1, f7) == 1);
    CHECK_THROWS_AS(power_residue_level(f7.from_int(2), 3, 2, f7), PreconditionError);
    CHECK_THROWS_AS(power_residue_level(f7.zero(), 3, 1, f7), PreconditionError);

    auto f = ResidueField::prime_field(97);  // 96 = 2^5 * 3
    for (u64 v = 1; v < 97; ++v) {
        auto x = f.from_int(static_cast<i64>(v));
        unsigned k = power_residue_level(x, 2, 5, f);
        REQUIRE(f.pow(x, 96 / ipow(2, k)) == f.one());
        if (k < 5)
            REQUIRE(f.pow(x, 96 / ipow(2, k + 1)) != f.one());
    }
}

TEST_CASE("ell_root")
{
    auto f7 = ResidueField::prime_field(7);
    auto y = ell_root(f7.from_int(2), 2, f7);
    CHECK((y == f7.from_int(3) || y == f7.from_int(4)));
    auto z = ell_root(f7.from_int(6), 3, f7);
    CHECK((z == f7.from_int(3) || z == f7.from_int(5) || z == f7.from_int(6)));
    CHECK(f7.pow(ell_root(f7.one(), 3, f7), 3) == f7.one());
    CHECK_THROWS_AS(ell_root(f7.from_int(3), 2, f7), PreconditionError);

    // root followed by power is the identity on the ell-th powers
    for (u64 p : {7ULL, 13ULL, 73ULL, 97ULL, 163ULL, 1009ULL}) {
        for (unsigned deg : {1U, 2U}) {
            auto f = deg == 1 ? ResidueField::prime_field(p) : ResidueField::quadratic_extension(p);
            std::mt19937_64 rng(p * deg);
            for (u64 ell : {2ULL, 3ULL, 5ULL, 7ULL}) {
                for (int i = 0; i < 40; ++i) {
                    Fq x = f.nth(rng() % (f.order() - 1) + 1);
                    Fq sq = f.pow(x, ell);
                    REQUIRE(f.pow(ell_root(sq, ell, f), ell) == sq);
                }
            }
        }
    }
}

TEST_CASE("multiplicative_order")
{
    auto f7 = ResidueField::prime_field(7);
    CHECK(multiplicative_order(f7.one(), f7) == 1);
    CHECK(multiplicative_order(f7.from_int(2), f7) == 3);
    CHECK(multiplicative_order(f7.from_int(3), f7) == 6);

    for (u64 p : {11ULL, 101ULL, 1013ULL}) {
        auto f = ResidueField::quadratic_extension(p);
        u64 q1 = f.order() - 1;
        std::mt19937_64 rng(p);
        for (int i = 0; i < 50; ++i) {
            Fq x = f.nth(rng() % q1 + 1);
            REQUIRE(f.pow(x, q1) == f.one());  // Lagrange
            u64 d = multiplicative_order(x, f);
            REQUIRE(q1 % d == 0);
            REQUIRE(f.pow(x, d) == f.one());
            for (auto const & pe : factor(d))
                REQUIRE(f.pow(x, d / pe.prime) != f.one());
        }
    }
}

TEST_CASE("F_p^2 agrees with polynomial arithmetic mod (x^2 - n0, p)")
{
    for (u64 p : {3ULL, 5ULL, 13ULL, 101ULL, 65537ULL}) {
        auto f = ResidueField::quadratic_extension(p);
        u64 n0 = f.nonresidue();
        CHECK(powmod(n0, (p - 1) / 2, p) == p - 1);
        for (u64 m = 2; m < n0; ++m)
            CHECK(powmod(m, (p - 1) / 2, p) == 1);
        std::mt19937_64 rng(p);
        for (int i = 0; i < 100; ++i) {
            u64 a0 = rng() % p, a1 = rng() % p, b0 = rng() % p, b1 = rng() % p;
            // (a0 + a1 x)(b0 + b1 x) = a0 b0 + (a0 b1 + a1 b0) x + a1 b1 x^2
            u64 x2 = mulmod(a1, b1, p);
            u64 c0 = (mulmod(a0, b0, p) + mulmod(x2, n0, p)) % p;
            u64 c1 = (mulmod(a0, b1, p) + mulmod(a1, b0, p)) % p;
            auto prod = f.mul(f.element(a0, a1), f.element(b0, b1));
            REQUIRE(prod == Fq{c0, c1});
            if (a0 || a1)
                REQUIRE(f.mul(f.element(a0, a1), f.inv(f.element(a0, a1))) == f.one());
        }
    }
    CHECK_THROWS_AS(ResidueField::quadratic_extension(2), PreconditionError);
    CHECK_THROWS_AS(ResidueField::prime_field(9), PreconditionError);
}

TEST_CASE("kronecker")
{
    CHECK(kronecker(-23, 2) == 1);
    CHECK(kronecker(-23, 23) == 0);
    CHECK(kronecker(-23, 5) == -1);
    CHECK(kronecker(-8, 2) == 0);
    CHECK(kronecker(-3, 2) == -1);
}
