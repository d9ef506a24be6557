#include <numeric>

#include "doctest.h"

#include "cdeg/constructor.hpp"

using namespace cdeg;
using namespace cdeg::cons;

namespace {

PrimeIdeal rational_prime(u64 p)
{
    return quad::factor_rational_prime(BaseField::rational(), p).at(0);
}

// Independent recomputation over Q from the conductors alone: the piece of
// conductor p is the degree-ell^r subfield of Q(zeta_p), so the Frobenius
// order of q is the order of q^((p-1)/ell^r) mod p.
u64 oracle_order_in_piece(u64 q, u64 p, u64 deg)
{
    u64 z = arith::powmod(q % p, (p - 1) / deg, p);
    u64 o = 1;
    for (u64 y = z; y != 1; y = y * z % p)
        ++o;
    return o;
}

// Over Q every ramified prime is totally ramified in its component, so the
// local degree is e times the lcm of the unramified Frobenius orders.
void check_rational_certificate(ExtensionCertificate const & cert)
{
    u64 deg = cert.degree();
    auto l0 = cf::build_L0_rational(cert.ell, cert.r);
    for (auto const & e : cert.table) {
        u64 q = e.prime.p;
        u64 ram = 1, unram = 1;
        int ramified = 0;
        if (q == cert.ell) {
            ram = deg;
            ++ramified;
        } else {
            unram = *cf::frobenius_order_in_L0(l0, e.prime, cert.field);
        }
        for (auto const & piece : cert.pieces) {
            if (piece.conductor.p == q) {
                ram = deg;
                ++ramified;
            } else {
                unram = std::lcm(unram, oracle_order_in_piece(q, piece.conductor.p, deg));
            }
        }
        REQUIRE(ramified <= 1);
        CHECK(ram * unram == deg);
        CHECK(e.degree == deg);
    }
}

} // namespace

TEST_CASE("construct over Q with ell = 3, r = 1")
{
    auto cert = construct(BaseField::rational(), 3, 1, 3);
    CHECK(cert.pieces.empty());
    REQUIRE(cert.table.size() == 2);
    CHECK(cert.table[0].prime == rational_prime(2));
    CHECK(cert.table[0].degree == 3);
    CHECK_FALSE(cert.table[0].ramified_component);
    CHECK(cert.table[1].prime == rational_prime(3));
    CHECK(cert.table[1].degree == 3);
    CHECK(cert.table[1].ramified_component == 0u);
    CHECK_FALSE(cert.real_place_degree);

    auto small = construct(BaseField::rational(), 3, 1, 2);
    REQUIRE(small.table.size() == 1);
    CHECK(small.table[0].degree == 3);
    CHECK(small.pieces.empty());
}

TEST_CASE("construct over Q with ell = 2, r = 1")
{
    auto cert = construct(BaseField::rational(), 2, 1, 10);
    // only 3 splits in Q(sqrt(-2)) among 3, 5, 7
    REQUIRE(cert.pieces.size() == 1);
    CHECK(cert.pieces[0].conductor == rational_prime(17));
    CHECK(cert.real_place_degree == 2u);
    REQUIRE(cert.table.size() == 4);
    for (auto const & e : cert.table)
        CHECK(e.degree == 2);
    check_rational_certificate(cert);

    // paper-literal mode adds a piece for every non-special prime
    ConstructConfig literal;
    literal.greedy_skip = false;
    auto full = construct(BaseField::rational(), 2, 1, 10, literal);
    CHECK(full.pieces.size() > cert.pieces.size());
    check_rational_certificate(full);
}

TEST_CASE("construct over Q for larger degrees")
{
    for (auto const & [ell, r] : std::vector<std::pair<u64, unsigned>>{{2, 2}, {2, 3}, {3, 2}, {5, 1}, {7, 1}}) {
        auto cert = construct(BaseField::rational(), ell, r, 60);
        check_rational_certificate(cert);
        for (std::size_t i = 0; i < cert.pieces.size(); ++i)
            for (std::size_t j = i + 1; j < cert.pieces.size(); ++j)
                CHECK_FALSE(cert.pieces[i].conductor == cert.pieces[j].conductor);
    }
}

TEST_CASE("construct over imaginary quadratic fields")
{
    struct Case
    {
        i64 d;
        u64 ell;
        unsigned r;
    };
    for (auto const & c : std::vector<Case>{{-23, 3, 1}, {-23, 2, 1}, {-4, 2, 1}, {-3, 3, 1}, {-8, 2, 1}, {-56, 2, 2}}) {
        auto k = BaseField::imaginary_quadratic(c.d);
        auto cert = construct(k, c.ell, c.r, 40);
        CAPTURE(c.d);
        CAPTURE(c.ell);
        for (auto const & e : cert.table)
            CHECK(e.degree == cert.degree());
        CHECK(cert.table.size() == quad::primes_up_to(k, 40).size());
        if (c.d == -8 || c.d == -56)
            CHECK(cert.deficiencies.size() == 1);
        else
            CHECK(cert.deficiencies.empty());
    }
}

TEST_CASE("construction is deterministic")
{
    auto k = BaseField::imaginary_quadratic(-23);
    auto a = construct(k, 3, 1, 30);
    auto b = construct(k, 3, 1, 30);
    REQUIRE(a.pieces.size() == b.pieces.size());
    for (std::size_t i = 0; i < a.pieces.size(); ++i)
        CHECK(a.pieces[i].conductor == b.pieces[i].conductor);
}

TEST_CASE("compose_for_n")
{
    for (u64 n : {6ULL, 12ULL}) {
        auto c = compose_for_n(BaseField::rational(), n, 20);
        u64 prod = 1;
        for (auto const & comp : c.components) {
            prod *= comp.degree();
            check_rational_certificate(comp);
        }
        CHECK(prod == n);
        CHECK(c.table.size() == 8);
        for (auto const & e : c.table)
            CHECK(e.degree == n);
    }
    CHECK(compose_for_n(BaseField::rational(), 9, 10).components.size() == 1);
    CHECK_THROWS_AS(compose_for_n(BaseField::rational(), 1, 10), PreconditionError);
}
