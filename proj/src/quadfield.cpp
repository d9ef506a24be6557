#include "cdeg/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

namespace cdeg::quad {

using arith::Fq;
using arith::ResidueField;

namespace {

struct Egcd
{
    i128 g, x, y;
};

Egcd egcd(i128 a, i128 b)
{
    i128 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        i128 q = old_r / r;
        std::tie(old_r, r) = std::pair<i128, i128>(r, old_r - q * r);
        std::tie(old_s, s) = std::pair<i128, i128>(s, old_s - q * s);
        std::tie(old_t, t) = std::pair<i128, i128>(t, old_t - q * t);
    }
    if (old_r < 0)
        return {-old_r, -old_s, -old_t};
    return {old_r, old_s, old_t};
}

i64 narrow(i128 v, char const * what)
{
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error(std::string(what) + ": value exceeds 64 bits");
    return static_cast<i64>(v);
}

i128 floor_mod(i128 x, i128 m)
{
    i128 r = x % m;
    return r < 0 ? r + m : r;
}

bool squarefree(u64 m)
{
    for (auto const & pe : arith::factor(m))
        if (pe.exponent > 1)
            return false;
    return true;
}

u64 isqrt(u64 n)
{
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (r > 0 && r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

} // namespace

bool is_fundamental_discriminant(i64 d)
{
    if (d == 0 || d == 1)
        return false;
    u64 ad = static_cast<u64>(d < 0 ? -d : d);
    if (arith::reduce(d, 4) == 1)
        return squarefree(ad);
    if (arith::reduce(d, 4) != 0)
        return false;
    i64 m = d / 4;
    u64 m4 = arith::reduce(m, 4);
    return (m4 == 2 || m4 == 3) && squarefree(ad / 4);
}

BaseField BaseField::imaginary_quadratic(i64 d)
{
    if (d >= 0 || !is_fundamental_discriminant(d))
        throw PreconditionError("discriminant " + std::to_string(d) +
                                " is not a negative fundamental discriminant"
                                " (need D = 1 mod 4 squarefree, or D = 4m with m = 2,3 mod 4 squarefree)");
    return BaseField(d);
}

unsigned BaseField::unit_count() const
{
    if (disc_ == -4)
        return 4;
    if (disc_ == -3)
        return 6;
    return 2;
}

std::ostream & operator<<(std::ostream & o, BaseField const & k)
{
    if (k.is_rational())
        return o << "Q";
    return o << "Q(sqrt(" << k.disc() << "))";
}

FieldElement multiply(BaseField const & k, FieldElement const & u, FieldElement const & v)
{
    if (k.is_rational())
        return {narrow(static_cast<i128>(u.x) * v.x / 2, "multiply"), 0};
    i128 x = static_cast<i128>(u.x) * v.x + static_cast<i128>(k.disc()) * u.y * v.y;
    i128 y = static_cast<i128>(u.x) * v.y + static_cast<i128>(v.x) * u.y;
    return {narrow(x / 2, "multiply"), narrow(y / 2, "multiply")};
}

FieldElement power(BaseField const & k, FieldElement u, u64 e)
{
    FieldElement r = FieldElement::integer(1);
    while (e) {
        if (e & 1)
            r = multiply(k, r, u);
        e >>= 1;
        if (e)
            u = multiply(k, u, u);
    }
    return r;
}

FieldElement conjugate(FieldElement const & u)
{
    return {u.x, -u.y};
}

i128 norm(BaseField const & k, FieldElement const & u)
{
    if (k.is_rational()) {
        i128 n = u.x / 2;
        return n < 0 ? -n : n;
    }
    return (static_cast<i128>(u.x) * u.x - static_cast<i128>(k.disc()) * u.y * u.y) / 4;
}

bool is_valid(BaseField const & k, FieldElement const & u)
{
    if (k.is_rational())
        return u.y == 0 && u.x % 2 == 0;
    return arith::reduce(u.x - u.y * k.disc(), 2) == 0;
}

char const * to_string(SplitType t)
{
    switch (t) {
    case SplitType::Rational: return "rational";
    case SplitType::Split: return "split";
    case SplitType::Inert: return "inert";
    case SplitType::Ramified: return "ramified";
    }
    return "?";
}

std::ostream & operator<<(std::ostream & o, PrimeIdeal const & q)
{
    if (q.has_root())
        return o << "(" << q.p << ", " << q.root << ")";
    return o << q.p;
}

std::vector<PrimeIdeal> factor_rational_prime(BaseField const & k, u64 p)
{
    if (p < 2 || !arith::is_prime(p))
        throw PreconditionError("factor_rational_prime: p must be prime");
    if (k.is_rational())
        return {{p, SplitType::Rational, -1}};
    i64 d = k.disc();
    int kr = arith::kronecker(d, p);
    if (kr == -1)
        return {{p, SplitType::Inert, -1}};

    std::vector<i64> roots;
    if (p == 2) {
        for (i64 b = 0; b < 4; ++b)
            if (arith::reduce(b * b - d, 8) == 0)
                roots.push_back(b);
    } else {
        auto f = ResidueField::prime_field(p);
        u64 s = arith::ell_root(f.from_int(d), 2, f).c0;
        std::set<i64> lifts;
        for (u64 r : {s, (p - s) % p}) {
            i64 b = static_cast<i64>(r);
            if (arith::reduce(b - d, 2) != 0)
                b += static_cast<i64>(p);
            lifts.insert(b);
        }
        roots.assign(lifts.begin(), lifts.end());
    }
    std::vector<PrimeIdeal> out;
    for (i64 b : roots)
        out.push_back({p, kr == 0 ? SplitType::Ramified : SplitType::Split, b});
    return out;
}

std::vector<PrimeIdeal> primes_up_to(BaseField const & k, u64 bound)
{
    std::vector<PrimeIdeal> out;
    for (u64 p = 2; p <= bound; ++p) {
        if (!arith::is_prime(p))
            continue;
        for (auto const & q : factor_rational_prime(k, p))
            if (q.norm() <= bound)
                out.push_back(q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

QuadIdeal unit_ideal(BaseField const & k)
{
    if (k.is_rational())
        return {1, 1, 0};
    return {1, 1, static_cast<i64>(arith::reduce(k.disc(), 2))};
}

QuadIdeal ideal_of(BaseField const & k, PrimeIdeal const & q)
{
    i64 p = static_cast<i64>(q.p);
    switch (q.type) {
    case SplitType::Rational:
        return {p, 1, 0};
    case SplitType::Inert:
        return {p, 1, static_cast<i64>(arith::reduce(k.disc(), 2))};
    default:
        // kernel of sqrt(D) -> b is generated by p and (-b + sqrt D)/2
        return {1, p, (2 * p - q.root) % (2 * p)};
    }
}

QuadIdeal multiply(BaseField const & k, QuadIdeal const & i, QuadIdeal const & j)
{
    if (k.is_rational())
        return {narrow(static_cast<i128>(i.content) * j.content, "ideal multiply"), 1, 0};
    i128 a1 = i.a, b1 = i.b, a2 = j.a, b2 = j.b, d = k.disc();
    i128 s = (b1 + b2) / 2;
    auto [d1, u1, v1] = egcd(a1, a2);
    auto [g, u2, w] = egcd(d1, s);
    i128 u = u2 * u1, v = u2 * v1;
    i128 a3 = a1 * a2 / (g * g);
    i128 num = u * a1 * b2 + v * a2 * b1 + w * ((b1 * b2 + d) / 2);
    if (num % g != 0)
        throw InternalInconsistency("ideal multiply: composition numerator not divisible");
    i128 b3 = floor_mod(num / g, 2 * a3);
    if (floor_mod(b3 * b3 - d, 4 * a3) != 0)
        throw InternalInconsistency("ideal multiply: result is not an ideal");
    return {narrow(static_cast<i128>(i.content) * j.content * g, "ideal multiply"),
            narrow(a3, "ideal multiply"), narrow(b3, "ideal multiply")};
}

QuadIdeal power(BaseField const & k, QuadIdeal const & i, u64 e)
{
    QuadIdeal r = unit_ideal(k);
    QuadIdeal base = i;
    while (e) {
        if (e & 1)
            r = multiply(k, r, base);
        e >>= 1;
        if (e)
            base = multiply(k, base, base);
    }
    return r;
}

QuadIdeal conjugate(BaseField const & k, QuadIdeal const & i)
{
    if (k.is_rational())
        return i;
    return {i.content, i.a, (2 * i.a - i.b) % (2 * i.a)};
}

bool contains(BaseField const & k, QuadIdeal const & i, FieldElement const & u)
{
    if (k.is_rational())
        return u.y == 0 && (u.x / 2) % i.content == 0;
    if (u.x % i.content != 0 || u.y % i.content != 0)
        return false;
    i128 x = u.x / i.content, y = u.y / i.content;
    i128 rest = x - y * i.b;
    return floor_mod(rest, 2 * static_cast<i128>(i.a)) == 0;
}

bool BinaryQuadraticForm::is_reduced() const
{
    i64 ab = b < 0 ? -b : b;
    if (!(ab <= a && a <= c))
        return false;
    if ((ab == a || a == c) && b < 0)
        return false;
    return true;
}

std::ostream & operator<<(std::ostream & o, BinaryQuadraticForm const & f)
{
    return o << "(" << f.a << "," << f.b << "," << f.c << ")";
}

BinaryQuadraticForm reduce_form(BinaryQuadraticForm f)
{
    i64 d = f.discriminant();
    if (d >= 0 || f.a <= 0)
        throw PreconditionError("reduce_form: need a positive definite form");
    auto normalize = [d](BinaryQuadraticForm & g) {
        i64 two_a = 2 * g.a;
        i64 b = static_cast<i64>(floor_mod(g.b, two_a));
        if (b > g.a)
            b -= two_a;
        g.b = b;
        g.c = narrow((static_cast<i128>(b) * b - d) / (4 * static_cast<i128>(g.a)), "reduce_form");
    };
    normalize(f);
    while (f.a > f.c) {
        f = {f.c, -f.b, f.a};
        normalize(f);
    }
    if (f.a == f.c && f.b < 0)
        f.b = -f.b;
    return f;
}

BinaryQuadraticForm principal_form(i64 d)
{
    i64 b = static_cast<i64>(arith::reduce(d, 2));
    return {1, b, (b - d) / 4};
}

BinaryQuadraticForm inverse_form(BinaryQuadraticForm const & f)
{
    return reduce_form({f.a, -f.b, f.c});
}

namespace {

QuadIdeal ideal_from_form(BinaryQuadraticForm const & f)
{
    return {1, f.a, static_cast<i64>(floor_mod(f.b, 2 * f.a))};
}

BinaryQuadraticForm primitive_form(i64 d, QuadIdeal const & i)
{
    return reduce_form({i.a, i.b, narrow((static_cast<i128>(i.b) * i.b - d) / (4 * static_cast<i128>(i.a)), "form_of")});
}

} // namespace

BinaryQuadraticForm compose_forms(BinaryQuadraticForm const & f, BinaryQuadraticForm const & g)
{
    i64 d = f.discriminant();
    if (g.discriminant() != d)
        throw PreconditionError("compose_forms: discriminants differ");
    auto k = BaseField::imaginary_quadratic(d);
    return primitive_form(d, multiply(k, ideal_from_form(f), ideal_from_form(g)));
}

BinaryQuadraticForm form_of(BaseField const & k, QuadIdeal const & i)
{
    if (k.is_rational())
        return {1, 0, 0};
    return primitive_form(k.disc(), i);
}

ClassGroup::ClassGroup(BaseField const & k) : field_(k)
{
    if (k.is_rational())
        return;
    i64 d = k.disc();
    i64 amax = static_cast<i64>(isqrt(static_cast<u64>(-d) / 3));
    for (i64 a = 1; a <= amax; ++a) {
        for (i64 b = -a + 1; b <= a; ++b) {
            if (arith::reduce(b - d, 2) != 0)
                continue;
            i64 num = b * b - d;
            if (num % (4 * a) != 0)
                continue;
            BinaryQuadraticForm f{a, b, num / (4 * a)};
            if (!f.is_reduced())
                continue;
            if (std::gcd(std::gcd(a, b < 0 ? -b : b), f.c) != 1)
                continue;
            forms_.push_back(f);
        }
    }
    std::sort(forms_.begin(), forms_.end());
}

BinaryQuadraticForm ClassGroup::identity() const
{
    if (field_.is_rational())
        return {1, 0, 0};
    return principal_form(field_.disc());
}

BinaryQuadraticForm ClassGroup::compose(BinaryQuadraticForm const & f, BinaryQuadraticForm const & g) const
{
    if (field_.is_rational())
        return identity();
    return compose_forms(f, g);
}

BinaryQuadraticForm ClassGroup::pow(BinaryQuadraticForm const & f, u64 e) const
{
    BinaryQuadraticForm r = identity();
    for (u64 i = 0; i < e % class_number(); ++i)
        r = compose(r, f);
    return r;
}

u64 ClassGroup::order(BinaryQuadraticForm const & f) const
{
    BinaryQuadraticForm g = f;
    u64 n = 1;
    while (g != identity()) {
        g = compose(g, f);
        if (++n > class_number())
            throw InternalInconsistency("ClassGroup::order: element order exceeds class number");
    }
    return n;
}

BinaryQuadraticForm ClassGroup::class_of(QuadIdeal const & i) const
{
    return form_of(field_, i);
}

BinaryQuadraticForm ClassGroup::class_of(PrimeIdeal const & q) const
{
    return form_of(field_, ideal_of(field_, q));
}

ClassGroup enumerate_class_group(BaseField const & k)
{
    return ClassGroup(k);
}

u64 ClassGroupLPart::order() const
{
    u64 n = 1;
    for (unsigned m : exponents)
        n *= arith::ipow(ell, m);
    return n;
}

namespace {

bool is_ell_power(u64 n, u64 ell)
{
    while (n % ell == 0)
        n /= ell;
    return n == 1;
}

std::size_t subgroup_size(ClassGroup const & cl, std::vector<BinaryQuadraticForm> const & gens)
{
    std::set<BinaryQuadraticForm> seen{cl.identity()};
    std::vector<BinaryQuadraticForm> frontier{cl.identity()};
    while (!frontier.empty()) {
        auto f = frontier.back();
        frontier.pop_back();
        for (auto const & g : gens) {
            auto h = cl.compose(f, g);
            if (seen.insert(h).second)
                frontier.push_back(h);
        }
    }
    return seen.size();
}

} // namespace

ClassGroupLPart class_group_l_part(BaseField const & k, ClassGroup const & cl, u64 ell,
                                   std::vector<u64> const & excluded, u64 prime_cap)
{
    ClassGroupLPart part;
    part.ell = ell;
    if (k.is_rational() || cl.class_number() % ell != 0)
        return part;

    std::vector<BinaryQuadraticForm> sylow;
    std::map<unsigned, u64> count_dividing;  // j -> |Cl[ell^j]|
    unsigned max_level = 0;
    for (auto const & f : cl.forms()) {
        u64 o = cl.order(f);
        if (!is_ell_power(o, ell))
            continue;
        sylow.push_back(f);
        unsigned lvl = arith::valuation(o, ell);
        max_level = std::max(max_level, lvl);
        ++count_dividing[lvl];
    }
    // cumulative counts and the invariant factor exponents
    std::vector<u64> cum(max_level + 2, 0);
    for (unsigned j = 0; j <= max_level; ++j)
        cum[j] = (j ? cum[j - 1] : 0) + count_dividing[j];
    cum[max_level + 1] = cum[max_level];
    std::vector<unsigned> at_least(max_level + 2, 0);
    for (unsigned j = 1; j <= max_level; ++j)
        at_least[j] = arith::valuation(cum[j] / cum[j - 1], ell);
    std::vector<unsigned> target;
    for (unsigned j = max_level; j >= 1; --j)
        for (unsigned c = at_least[j] - at_least[j + 1]; c > 0; --c)
            target.push_back(j);

    std::set<u64> skip(excluded.begin(), excluded.end());
    skip.insert(2);
    skip.insert(ell);
    for (auto const & pe : arith::factor(static_cast<u64>(-k.disc())))
        skip.insert(pe.prime);

    std::map<BinaryQuadraticForm, PrimeIdeal> representative;
    std::vector<std::pair<PrimeIdeal, BinaryQuadraticForm>> candidates;
    for (u64 p = 2; representative.size() + 1 < sylow.size(); ++p) {
        if (p > prime_cap)
            throw SearchExhausted("class_group_l_part: no prime-ideal basis below the prime cap");
        if (skip.count(p) || !arith::is_prime(p))
            continue;
        for (auto const & q : factor_rational_prime(k, p)) {
            if (q.type == SplitType::Inert)
                continue;
            auto f = cl.class_of(q);
            if (f == cl.identity() || !std::binary_search(sylow.begin(), sylow.end(), f))
                continue;
            if (representative.emplace(f, q).second)
                candidates.emplace_back(q, f);
        }
    }

    std::vector<std::size_t> chosen;
    std::function<bool(std::size_t, u64)> search = [&](std::size_t pos, u64 size) {
        if (pos == target.size())
            return true;
        u64 want = arith::ipow(ell, target[pos]);
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            auto const & [q, f] = candidates[c];
            if (cl.order(f) != want)
                continue;
            bool reused = false;
            for (auto idx : chosen)
                reused = reused || candidates[idx].first.p == q.p;
            if (reused)
                continue;
            std::vector<BinaryQuadraticForm> gens;
            for (auto idx : chosen)
                gens.push_back(candidates[idx].second);
            gens.push_back(f);
            if (subgroup_size(cl, gens) != size * want)
                continue;
            chosen.push_back(c);
            if (search(pos + 1, size * want))
                return true;
            chosen.pop_back();
        }
        return false;
    };
    if (!search(0, 1))
        throw SearchExhausted("class_group_l_part: candidate primes do not contain a basis");

    for (std::size_t pos = 0; pos < chosen.size(); ++pos) {
        auto const & q = candidates[chosen[pos]].first;
        unsigned m = target[pos];
        auto gen = principal_generator(k, power(k, ideal_of(k, q), arith::ipow(ell, m)));
        if (!gen)
            throw InternalInconsistency("class_group_l_part: a_i^(ell^m_i) is not principal");
        part.generators.push_back(q);
        part.exponents.push_back(m);
        part.alphas.push_back(*gen);
        part.t = std::max(part.t, m);
    }
    if (part.order() != sylow.size())
        throw InternalInconsistency("class_group_l_part: basis order differs from Sylow order");
    return part;
}

std::vector<u64> class_dlog(ClassGroup const & cl, QuadIdeal const & i, ClassGroupLPart const & basis)
{
    std::size_t s = basis.rank();
    std::vector<u64> c(s, 0);
    if (s == 0)
        return c;
    std::vector<u64> radix(s);
    std::vector<BinaryQuadraticForm> inv(s);
    for (std::size_t j = 0; j < s; ++j) {
        radix[j] = arith::ipow(basis.ell, basis.exponents[j]);
        inv[j] = inverse_form(cl.class_of(basis.generators[j]));
    }
    auto start = cl.class_of(i);
    for (;;) {
        auto f = start;
        for (std::size_t j = 0; j < s; ++j)
            f = cl.compose(f, cl.pow(inv[j], c[j]));
        if (cl.order(f) % basis.ell != 0)
            return c;
        std::size_t j = 0;
        while (j < s && ++c[j] == radix[j])
            c[j++] = 0;
        if (j == s)
            throw InternalInconsistency("class_dlog: no exponent vector found; basis invalid");
    }
}

std::vector<FieldElement> units(BaseField const & k)
{
    if (k.disc() == -4)
        return {{2, 0}, {0, 1}, {-2, 0}, {0, -1}};
    if (k.disc() == -3)
        return {{2, 0}, {1, 1}, {-1, 1}, {-2, 0}, {-1, -1}, {1, -1}};
    return {{2, 0}, {-2, 0}};
}

std::vector<FieldElement> unit_generators(BaseField const & k)
{
    if (k.disc() == -4)
        return {{0, 1}};
    if (k.disc() == -3)
        return {{1, 1}};
    return {{-2, 0}};
}

FieldElement normalize_by_units(BaseField const & k, FieldElement const & u)
{
    long double scale = k.is_rational() ? 0.0L : std::sqrt(static_cast<long double>(-k.disc()));
    FieldElement best = u;
    long double best_angle = 10.0L;
    for (auto const & e : units(k)) {
        auto v = multiply(k, u, e);
        long double ang = std::atan2(static_cast<long double>(v.y) * scale, static_cast<long double>(v.x));
        if (ang < -1e-12L)
            ang += 2 * std::numbers::pi_v<long double>;
        if (ang < best_angle - 1e-12L) {
            best_angle = ang;
            best = v;
        }
    }
    return best;
}

std::optional<FieldElement> principal_generator(BaseField const & k, QuadIdeal const & i)
{
    if (k.is_rational())
        return FieldElement::integer(i.content);
    i128 d = k.disc();
    i128 four_a = 4 * static_cast<i128>(i.a);
    QuadIdeal primitive{1, i.a, i.b};
    for (i128 y = 0;; ++y) {
        i128 rem = four_a + d * y * y;
        if (rem < 0)
            break;
        u64 x = isqrt(static_cast<u64>(rem));
        if (static_cast<i128>(x) * x != rem)
            continue;
        for (i64 sx : {static_cast<i64>(x), -static_cast<i64>(x)}) {
            for (i64 sy : {static_cast<i64>(y), -static_cast<i64>(y)}) {
                FieldElement g{sx, sy};
                if (!is_valid(k, g) || !contains(k, primitive, g))
                    continue;
                FieldElement scaled{narrow(static_cast<i128>(sx) * i.content, "principal_generator"),
                                    narrow(static_cast<i128>(sy) * i.content, "principal_generator")};
                return normalize_by_units(k, scaled);
            }
        }
    }
    return std::nullopt;
}

ResidueField residue_field(PrimeIdeal const & q)
{
    if (q.type == SplitType::Inert)
        return ResidueField::quadratic_extension(q.p);
    return ResidueField::prime_field(q.p);
}

Fq reduce_mod(BaseField const & k, FieldElement const & u, PrimeIdeal const & q, ResidueField const & field)
{
    u64 p = q.p;
    if (field.characteristic() != p || field.degree() != q.residue_degree())
        throw PreconditionError("reduce_mod: residue field does not belong to the prime");
    if (k.is_rational() || q.type != SplitType::Inert) {
        if (k.is_rational() && u.x % 2 != 0)
            throw PreconditionError("reduce_mod: not an integer");
        // x + y*b is even: b = D = x*y (mod 2)
        i128 v = (static_cast<i128>(u.x) + static_cast<i128>(u.y) * q.root * (k.is_rational() ? 0 : 1)) / 2;
        return {arith::reduce(v, p), 0};
    }
    if (p == 2)
        throw PreconditionError("reduce_mod: inert prime above 2 has no odd residue field");
    auto fp = ResidueField::prime_field(p);
    u64 ratio = arith::mulmod(arith::reduce(k.disc(), p), arith::invmod(field.nonresidue(), p), p);
    u64 s = arith::ell_root(fp.from_int(static_cast<i64>(ratio)), 2, fp).c0;
    s = std::min(s, p - s);
    u64 inv2 = arith::invmod(2, p);
    u64 c0 = arith::mulmod(arith::reduce(u.x, p), inv2, p);
    u64 c1 = arith::mulmod(arith::mulmod(arith::reduce(u.y, p), s, p), inv2, p);
    return {c0, c1};
}

} // namespace cdeg::quad
