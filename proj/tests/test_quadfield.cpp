#include <random>
#include <set>

#include "doctest.h"

#include "cdeg/quadfield.hpp"

using namespace cdeg;
using namespace cdeg::quad;

namespace {

// Independent oracle: count reduced primitive forms by direct enumeration
// over all (a, b) without using the library's reduction.
std::set<BinaryQuadraticForm> brute_reduced_forms(i64 d)
{
    std::set<BinaryQuadraticForm> out;
    for (i64 a = 1; 3 * a * a <= -d; ++a)
        for (i64 b = -a; b <= a; ++b) {
            i64 num = b * b - d;
            if (num % (4 * a))
                continue;
            i64 c = num / (4 * a);
            if (c < a)
                continue;
            if ((b < 0) && (-b == a || a == c))
                continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1)
                continue;
            out.insert({a, b, c});
        }
    return out;
}

} // namespace

TEST_CASE("fundamental discriminants")
{
    CHECK(is_fundamental_discriminant(-3));
    CHECK(is_fundamental_discriminant(-4));
    CHECK(is_fundamental_discriminant(-8));
    CHECK(is_fundamental_discriminant(-23));
    CHECK_FALSE(is_fundamental_discriminant(-12));
    CHECK_FALSE(is_fundamental_discriminant(-16));
    CHECK_FALSE(is_fundamental_discriminant(-27));
    CHECK_FALSE(is_fundamental_discriminant(-1));
    CHECK_THROWS_AS(BaseField::imaginary_quadratic(-12), PreconditionError);
    CHECK_THROWS_AS(BaseField::imaginary_quadratic(5), PreconditionError);
}

TEST_CASE("factor_rational_prime")
{
    auto k = BaseField::imaginary_quadratic(-23);
    auto two = factor_rational_prime(k, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].type == SplitType::Split);
    CHECK(two[0].root == 1);
    CHECK(two[1].root == 3);
    auto r = factor_rational_prime(k, 23);
    REQUIRE(r.size() == 1);
    CHECK(r[0].type == SplitType::Ramified);
    auto five = factor_rational_prime(k, 5);
    REQUIRE(five.size() == 1);
    CHECK(five[0].type == SplitType::Inert);
    CHECK(five[0].norm() == 25);

    auto q = BaseField::rational();
    CHECK(factor_rational_prime(q, 7).front().p == 7);

    // roots satisfy b^2 = D mod 4p and conjugates multiply to (p)
    for (i64 d : {-3, -4, -8, -23, -47, -56, -71}) {
        auto kk = BaseField::imaginary_quadratic(d);
        for (u64 p = 2; p < 200; ++p) {
            if (!arith::is_prime(p))
                continue;
            auto ps = factor_rational_prime(kk, p);
            for (auto const & pr : ps) {
                if (pr.has_root()) {
                    REQUIRE(arith::reduce(pr.root * pr.root - d, 4 * p) == 0);
                    REQUIRE(pr.root >= 0);
                    REQUIRE(pr.root < static_cast<i64>(2 * p));
                }
            }
            if (ps.size() == 2) {
                auto prod = multiply(kk, ideal_of(kk, ps[0]), ideal_of(kk, ps[1]));
                REQUIRE(prod == QuadIdeal{static_cast<i64>(p), 1, static_cast<i64>(arith::reduce(d, 2))});
            }
            if (ps.front().type == SplitType::Ramified) {
                auto sq = multiply(kk, ideal_of(kk, ps[0]), ideal_of(kk, ps[0]));
                REQUIRE(sq.content == static_cast<i64>(p));
                REQUIRE(sq.a == 1);
            }
        }
    }
}

TEST_CASE("reduce_form")
{
    CHECK(reduce_form({1, 1, 6}) == BinaryQuadraticForm{1, 1, 6});
    CHECK(reduce_form({6, 1, 1}) == BinaryQuadraticForm{1, 1, 6});
    CHECK(reduce_form({3, -1, 2}) == BinaryQuadraticForm{2, 1, 3});
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        i64 a = static_cast<i64>(rng() % 50) + 1;
        i64 b = static_cast<i64>(rng() % 101) - 50;
        i64 c = (b * b) / (4 * a) + static_cast<i64>(rng() % 40) + 1;
        BinaryQuadraticForm f{a, b, c};
        if (f.discriminant() >= 0)
            continue;
        auto g = reduce_form(f);
        REQUIRE(g.is_reduced());
        REQUIRE(g.discriminant() == f.discriminant());
        REQUIRE(reduce_form(g) == g);
    }
}

TEST_CASE("compose_forms")
{
    BinaryQuadraticForm id{1, 1, 6}, g{2, 1, 3}, gi{2, -1, 3};
    CHECK(compose_forms(id, g) == g);
    CHECK(compose_forms(g, gi) == id);
    CHECK(compose_forms(g, g) == gi);
}

TEST_CASE("enumerate_class_group")
{
    auto h = [](i64 d) { return enumerate_class_group(BaseField::imaginary_quadratic(d)).class_number(); };
    auto c4 = enumerate_class_group(BaseField::imaginary_quadratic(-4));
    CHECK(c4.forms() == std::vector<BinaryQuadraticForm>{{1, 0, 1}});
    auto c23 = enumerate_class_group(BaseField::imaginary_quadratic(-23));
    CHECK(std::set<BinaryQuadraticForm>(c23.forms().begin(), c23.forms().end()) ==
          std::set<BinaryQuadraticForm>{{1, 1, 6}, {2, 1, 3}, {2, -1, 3}});
    CHECK(h(-23) == 3);
    CHECK(h(-47) == 5);
    CHECK(enumerate_class_group(BaseField::rational()).class_number() == 1);
    CHECK(h(-3) == 1);
    CHECK(h(-56) == 4);
    CHECK(h(-84) == 4);
}

TEST_CASE("form composition is an abelian group law for |D| <= 200")
{
    for (i64 d = -3; d >= -200; --d) {
        if (!is_fundamental_discriminant(d))
            continue;
        auto cl = enumerate_class_group(BaseField::imaginary_quadratic(d));
        auto const & fs = cl.forms();
        auto oracle = brute_reduced_forms(d);
        REQUIRE(std::set<BinaryQuadraticForm>(fs.begin(), fs.end()) == oracle);
        std::set<BinaryQuadraticForm> set(fs.begin(), fs.end());
        auto e = cl.identity();
        for (auto const & f : fs) {
            REQUIRE(cl.compose(e, f) == f);
            REQUIRE(cl.compose(f, inverse_form(f)) == e);
            for (auto const & g : fs) {
                auto fg = cl.compose(f, g);
                REQUIRE(set.count(fg));
                REQUIRE(fg == cl.compose(g, f));
                for (auto const & k : fs)
                    REQUIRE(cl.compose(fg, k) == cl.compose(f, cl.compose(g, k)));
            }
        }
    }
}

TEST_CASE("ideal multiplication matches form composition and element products")
{
    std::mt19937_64 rng(11);
    for (i64 d : {-23, -47, -56, -71, -84, -191}) {
        auto k = BaseField::imaginary_quadratic(d);
        auto cl = enumerate_class_group(k);
        auto ps = primes_up_to(k, 60);
        for (int it = 0; it < 60; ++it) {
            auto const & p1 = ps[rng() % ps.size()];
            auto const & p2 = ps[rng() % ps.size()];
            auto i1 = ideal_of(k, p1), i2 = ideal_of(k, p2);
            auto prod = multiply(k, i1, i2);
            REQUIRE(prod.norm() == i1.norm() * i2.norm());
            REQUIRE(cl.class_of(prod) == cl.compose(cl.class_of(i1), cl.class_of(i2)));
            // products of lattice generators lie in the product ideal
            auto gens = [&](QuadIdeal const & i) {
                return std::vector<FieldElement>{{2 * i.content * i.a, 0}, {i.content * i.b, i.content}};
            };
            for (auto const & u : gens(i1))
                for (auto const & v : gens(i2))
                    REQUIRE(contains(k, prod, multiply(k, u, v)));
        }
    }
}

TEST_CASE("class_group_l_part")
{
    auto k4 = BaseField::imaginary_quadratic(-4);
    auto p4 = class_group_l_part(k4, enumerate_class_group(k4), 3, {});
    CHECK(p4.rank() == 0);
    CHECK(p4.t == 0);

    auto k = BaseField::imaginary_quadratic(-23);
    auto cl = enumerate_class_group(k);
    auto part = class_group_l_part(k, cl, 3, {});
    REQUIRE(part.rank() == 1);
    CHECK(part.exponents[0] == 1);
    CHECK(part.t == 1);
    CHECK(part.generators[0].p != 2);  // 2 is always excluded
    CHECK(cl.order(cl.class_of(part.generators[0])) == 3);
    auto cube = power(k, ideal_of(k, part.generators[0]), 3);
    CHECK(norm(k, part.alphas[0]) == cube.norm());

    CHECK(class_group_l_part(k, cl, 2, {}).rank() == 0);

    // exclusion set is honored
    auto other = class_group_l_part(k, cl, 3, {part.generators[0].p});
    CHECK(other.generators[0].p != part.generators[0].p);

    // basis order equals the Sylow order; independence via brute force
    for (i64 d : {-47, -56, -71, -84, -260, -420, -455}) {
        if (!is_fundamental_discriminant(d))
            continue;
        auto kk = BaseField::imaginary_quadratic(d);
        auto cc = enumerate_class_group(kk);
        for (u64 ell : {2ULL, 3ULL, 5ULL}) {
            auto lp = class_group_l_part(kk, cc, ell, {});
            u64 sylow = 1, h = cc.class_number();
            while (h % ell == 0) {
                h /= ell;
                sylow *= ell;
            }
            REQUIRE(lp.order() == sylow);
            for (std::size_t i = 0; i < lp.rank(); ++i) {
                auto pw = power(kk, ideal_of(kk, lp.generators[i]), arith::ipow(ell, lp.exponents[i]));
                REQUIRE(norm(kk, lp.alphas[i]) == pw.norm());
                REQUIRE(contains(kk, pw, lp.alphas[i]));
            }
        }
    }
}

TEST_CASE("class_dlog")
{
    auto k = BaseField::imaginary_quadratic(-23);
    auto cl = enumerate_class_group(k);
    auto part = class_group_l_part(k, cl, 3, {});
    CHECK(class_dlog(cl, unit_ideal(k), part) == std::vector<u64>{0});
    auto a1 = cl.class_of(part.generators[0]);
    // pick ideals in each class: a prime above 2 in the class of a1 and its conjugate
    for (auto const & q : factor_rational_prime(k, 2)) {
        auto c = cl.class_of(q);
        auto dl = class_dlog(cl, ideal_of(k, q), part);
        if (c == a1)
            CHECK(dl == std::vector<u64>{1});
        else
            CHECK(dl == std::vector<u64>{2});
    }
}

TEST_CASE("principal_generator")
{
    auto k = BaseField::imaginary_quadratic(-23);
    CHECK(principal_generator(k, unit_ideal(k)) == FieldElement::integer(1));
    auto p2 = factor_rational_prime(k, 2)[0];
    CHECK_FALSE(principal_generator(k, ideal_of(k, p2)).has_value());
    auto g = principal_generator(k, power(k, ideal_of(k, p2), 3));
    REQUIRE(g.has_value());
    CHECK(norm(k, *g) == 8);
    CHECK(std::abs(g->x) == 3);
    CHECK(std::abs(g->y) == 1);

    // generator of a principal ideal has the ideal's norm, class_dlog is zero
    for (i64 d : {-3, -4, -23, -47}) {
        auto kk = BaseField::imaginary_quadratic(d);
        auto cl = enumerate_class_group(kk);
        for (auto const & q : primes_up_to(kk, 200)) {
            auto i = ideal_of(kk, q);
            auto o = cl.order(cl.class_of(q));
            auto pw = power(kk, i, o);
            auto gen = principal_generator(kk, pw);
            REQUIRE(gen.has_value());
            REQUIRE(norm(kk, *gen) == pw.norm());
            REQUIRE(contains(kk, pw, *gen));
            if (o > 1)
                REQUIRE_FALSE(principal_generator(kk, i).has_value());
            // normalization is a function of the ideal only
            for (auto const & u : units(kk))
                REQUIRE(normalize_by_units(kk, multiply(kk, *gen, u)) == *gen);
        }
    }
}

TEST_CASE("reduce_mod")
{
    auto k = BaseField::imaginary_quadratic(-23);
    auto ps = factor_rational_prime(k, 73);
    REQUIRE(ps.size() == 2);
    PrimeIdeal p14{};
    for (auto const & p : ps)
        if (p.root % 73 == 14)
            p14 = p;
    REQUIRE(p14.p == 73);
    auto f = residue_field(p14);
    CHECK(reduce_mod(k, FieldElement::integer(1), p14, f) == f.one());
    CHECK(reduce_mod(k, {3, 1}, p14, f) == f.from_int(45));

    auto p5 = factor_rational_prime(k, 5)[0];
    auto f25 = residue_field(p5);
    CHECK(f25.nonresidue() == 2);
    auto s = reduce_mod(k, {0, 2}, p5, f25);  // sqrt(-23)
    CHECK(f25.mul(s, s) == f25.from_int(-23));
    CHECK(s == arith::Fq{0, 1});

    // reduction is a ring homomorphism
    std::mt19937_64 rng(5);
    for (auto const & q : primes_up_to(k, 400)) {
        if (q.p == 2)
            continue;
        auto fq = residue_field(q);
        for (int i = 0; i < 10; ++i) {
            i64 y1 = static_cast<i64>(rng() % 41) - 20, y2 = static_cast<i64>(rng() % 41) - 20;
            i64 x1 = 2 * (static_cast<i64>(rng() % 41) - 20) + (y1 & 1);
            i64 x2 = 2 * (static_cast<i64>(rng() % 41) - 20) + (y2 & 1);
            FieldElement u{x1, y1}, v{x2, y2};
            REQUIRE(reduce_mod(k, multiply(k, u, v), q, fq) ==
                    fq.mul(reduce_mod(k, u, q, fq), reduce_mod(k, v, q, fq)));
        }
        // the prime's own ideal maps to zero
        auto i = ideal_of(k, q);
        if (i.content == 1)
            REQUIRE(reduce_mod(k, {i.b, 1}, q, fq) == fq.zero());
    }
}

TEST_CASE("unit_generators")
{
    CHECK(unit_generators(BaseField::rational()) == std::vector<FieldElement>{{-2, 0}});
    auto k4 = BaseField::imaginary_quadratic(-4);
    auto i = unit_generators(k4).front();
    CHECK(power(k4, i, 4) == FieldElement::integer(1));
    CHECK(power(k4, i, 2) == FieldElement::integer(-1));
    auto k3 = BaseField::imaginary_quadratic(-3);
    auto z = unit_generators(k3).front();
    CHECK(power(k3, z, 6) == FieldElement::integer(1));
    CHECK(power(k3, z, 3) == FieldElement::integer(-1));
    CHECK(power(k3, z, 2) != FieldElement::integer(1));
    CHECK(unit_generators(BaseField::imaginary_quadratic(-23)) == std::vector<FieldElement>{{-2, 0}});
}
