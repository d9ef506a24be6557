#include "cdeg/classfield.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace cdeg::cf {

namespace {

std::vector<u64> prime_divisors(u64 m)
{
    std::vector<u64> out;
    for (auto const & pe : arith::factor(m))
        out.push_back(pe.prime);
    return out;
}

} // namespace

Context::Context(BaseField const & k, u64 ell, unsigned r, quad::ClassGroupLPart lpart)
    : field_(k), classes_(k), ell_(ell), r_(r), lpart_(std::move(lpart)), unit_gens_(quad::unit_generators(k))
{
    if (ell < 2 || !arith::is_prime(ell))
        throw PreconditionError("Context: ell must be prime");
    if (r < 1)
        throw PreconditionError("Context: r must be >= 1");
    if (lpart_.ell != ell)
        throw PreconditionError("Context: class group data belongs to another ell");
    w_ = classes_.class_number();
    while (w_ % ell == 0)
        w_ /= ell;

    std::set<u64> ex{2, ell};
    if (!k.is_rational())
        for (u64 p : prime_divisors(static_cast<u64>(-k.disc())))
            ex.insert(p);
    for (auto const & a : lpart_.generators)
        ex.insert(a.p);
    excluded_.assign(ex.begin(), ex.end());
}

Context::Context(Context const & o)
    : field_(o.field_), classes_(o.classes_), ell_(o.ell_), r_(o.r_), lpart_(o.lpart_), unit_gens_(o.unit_gens_),
      w_(o.w_), excluded_(o.excluded_)
{
    std::lock_guard lock(o.cache_mutex_);
    lift_cache_ = o.lift_cache_;
}

Context Context::build(BaseField const & k, u64 ell, unsigned r, std::vector<u64> const & extra_exclusions)
{
    quad::ClassGroup cl(k);
    return Context(k, ell, r, quad::class_group_l_part(k, cl, ell, extra_exclusions));
}

bool Context::is_excluded(PrimeIdeal const & q) const
{
    return std::binary_search(excluded_.begin(), excluded_.end(), q.p);
}

IdealLift const & Context::lift(PrimeIdeal const & q) const
{
    {
        std::lock_guard lock(cache_mutex_);
        if (auto it = lift_cache_.find(q); it != lift_cache_.end())
            return it->second;
    }
    IdealLift l = lift_ideal(*this, q);
    std::lock_guard lock(cache_mutex_);
    return lift_cache_.emplace(q, std::move(l)).first->second;
}

IdealLift lift_ideal(Context const & ctx, PrimeIdeal const & q)
{
    auto const & k = ctx.field();
    auto const & lp = ctx.lpart();
    IdealLift lift;
    lift.w = ctx.prime_to_ell_class_factor();
    auto ideal = quad::power(k, quad::ideal_of(k, q), lift.w);
    lift.exponents = quad::class_dlog(ctx.classes(), ideal, lp);
    // q^w * prod a_i^-c_i = q^w * prod conj(a_i)^c_i / prod N(a_i)^c_i
    for (std::size_t i = 0; i < lp.rank(); ++i) {
        auto a = quad::ideal_of(k, lp.generators[i]);
        ideal = quad::multiply(k, ideal, quad::power(k, quad::conjugate(k, a), lift.exponents[i]));
        for (u64 j = 0; j < lift.exponents[i]; ++j)
            lift.denominator *= static_cast<i128>(a.norm());
    }
    auto gen = quad::principal_generator(k, ideal);
    if (!gen)
        throw InternalInconsistency("lift_ideal: corrected ideal is not principal");
    lift.generator = *gen;
    return lift;
}

bool in_S(Context const & ctx, PrimeIdeal const & p)
{
    auto const & k = ctx.field();
    u64 ell = ctx.ell();
    bool bad = p.p == 2 || p.p == ell || p.type == quad::SplitType::Ramified;
    if (!k.is_rational() && static_cast<u64>(-k.disc()) % p.p == 0)
        bad = true;
    for (auto const & a : ctx.lpart().generators)
        bad = bad || a == p;
    if (bad)
        throw PreconditionError("in_S: prime divides 2*ell*D or is a class group generator");

    unsigned level = ctx.level();
    u64 q = p.norm();
    if ((q - 1) % arith::ipow(ell, level) != 0)
        return false;
    if (ctx.classes().order(ctx.classes().class_of(p)) % ell == 0)
        return false;
    auto f = quad::residue_field(p);
    for (auto const & u : ctx.unit_gens())
        if (arith::power_residue_level(quad::reduce_mod(k, u, p, f), ell, level, f) != level)
            return false;
    auto const & lp = ctx.lpart();
    for (std::size_t i = 0; i < lp.rank(); ++i) {
        unsigned m = lp.exponents[i];
        if (arith::power_residue_level(quad::reduce_mod(k, lp.alphas[i], p, f), ell, m, f) != m)
            return false;
    }
    return true;
}

RayPiece make_ray_piece(Context const & ctx, PrimeIdeal const & eps)
{
    if (ctx.is_excluded(eps) || eps.type == quad::SplitType::Ramified)
        throw PreconditionError("make_ray_piece: conductor is excluded");
    if (!in_S(ctx, eps))
        throw PreconditionError("make_ray_piece: conductor is not in S");
    RayPiece piece{eps, quad::residue_field(eps), {}};
    auto const & lp = ctx.lpart();
    for (std::size_t i = 0; i < lp.rank(); ++i) {
        Fq x = quad::reduce_mod(ctx.field(), lp.alphas[i], eps, piece.residue);
        for (unsigned j = 0; j < lp.exponents[i]; ++j)
            x = arith::ell_root(x, ctx.ell(), piece.residue);
        piece.alpha_roots.push_back(x);
    }
    return piece;
}

Fq splitting_map_image(Context const & ctx, RayPiece const & piece, IdealLift const & lift,
                       std::span<Fq const> alpha_roots)
{
    auto const & f = piece.residue;
    Fq g = quad::reduce_mod(ctx.field(), lift.generator, piece.conductor, f);
    Fq den{arith::reduce(lift.denominator, f.characteristic()), 0};
    if (g == f.zero() || den == f.zero())
        throw PreconditionError("splitting_map_image: ideal not coprime to the conductor");
    Fq out = f.mul(g, f.inv(den));
    for (std::size_t i = 0; i < alpha_roots.size(); ++i)
        out = f.mul(out, f.pow(alpha_roots[i], lift.exponents.at(i)));
    return out;
}

Fq splitting_map_image(Context const & ctx, RayPiece const & piece, PrimeIdeal const & q)
{
    if (q == piece.conductor)
        throw PreconditionError("splitting_map_image: q equals the conductor");
    return splitting_map_image(ctx, piece, ctx.lift(q), piece.alpha_roots);
}

u64 frobenius_order_of_image(Context const & ctx, RayPiece const & piece, Fq const & image)
{
    auto const & f = piece.residue;
    Fq z = f.pow(image, (f.order() - 1) / ctx.degree());
    u64 order = 1;
    while (z != f.one()) {
        z = f.pow(z, ctx.ell());
        order *= ctx.ell();
        if (order > ctx.degree())
            throw InternalInconsistency("frobenius_order_of_image: order exceeds ell^r");
    }
    return order;
}

u64 frobenius_order_in_ray_piece(Context const & ctx, RayPiece const & piece, PrimeIdeal const & q)
{
    if (q == piece.conductor)
        return ctx.degree();
    return frobenius_order_of_image(ctx, piece, splitting_map_image(ctx, piece, q));
}

bool kummer_split_test(Context const & ctx, PrimeIdeal const & p, FieldElement const & alpha, unsigned k)
{
    if (k == 0)
        return true;
    u64 ell = ctx.ell();
    auto const & field = ctx.field();
    if (p.p == 2 || p.p == ell || (!field.is_rational() && static_cast<u64>(-field.disc()) % p.p == 0))
        throw PreconditionError("kummer_split_test: prime divides 2*ell*D");
    auto f = quad::residue_field(p);
    Fq a = quad::reduce_mod(field, alpha, p, f);
    if (a == f.zero())
        throw PreconditionError("kummer_split_test: prime divides alpha");
    if ((f.order() - 1) % arith::ipow(ell, k) != 0)
        return false;
    return arith::power_residue_level(a, ell, k, f) == k;
}

CyclotomicPiece build_L0_rational(u64 ell, unsigned r)
{
    if (ell < 2 || !arith::is_prime(ell) || r < 1)
        throw PreconditionError("build_L0_rational: need ell prime and r >= 1");
    if (ell == 2)
        return {2, r, arith::ipow(2, r + 2), 5, -1};
    u64 m = arith::ipow(ell, r + 1);
    u64 phi = m / ell * (ell - 1);
    for (u64 g = 2;; ++g) {
        if (g % ell == 0)
            continue;
        auto fac = arith::factor(phi);
        bool primitive = std::all_of(fac.begin(), fac.end(),
                                     [&](auto const & pe) { return arith::powmod(g, phi / pe.prime, m) != 1; });
        if (primitive)
            // chi(-1) = zeta^(phi/2) and ell^r | phi/2
            return {ell, r, m, g, 1};
    }
}

u64 chi_exponent(CyclotomicPiece const & piece, u64 x)
{
    u64 m = piece.modulus;
    x %= m;
    if (x % piece.ell == 0)
        throw PreconditionError("chi_exponent: argument not prime to ell");
    u64 order = piece.order();
    if (piece.ell == 2) {
        bool negative = x % 4 == 3;
        u64 y = negative ? m - x : x;
        u64 j = 0, acc = 1;
        while (acc != y) {
            acc = acc * 5 % m;
            if (++j > order)
                throw InternalInconsistency("chi_exponent: 5 does not reach x");
        }
        return (j + (negative ? order / 2 : 0)) % order;
    }
    u64 acc = 1;
    for (u64 e = 0; e < m; ++e) {
        if (acc == x)
            return e % order;
        acc = acc * piece.generator % m;
    }
    throw InternalInconsistency("chi_exponent: generator does not reach x");
}

std::optional<u64> frobenius_order_in_L0(CyclotomicPiece const & piece, PrimeIdeal const & q, BaseField const &)
{
    if (q.p == piece.ell)
        return std::nullopt;
    u64 e = chi_exponent(piece, arith::powmod(q.p, q.residue_degree(), piece.modulus));
    u64 order = piece.order();
    return order / std::gcd(e, order);
}

namespace {

// n in Q_2^{*2}, n a nonzero integer
bool is_dyadic_square(i64 n)
{
    unsigned v = 0;
    while (n % 2 == 0) {
        n /= 2;
        ++v;
    }
    return v % 2 == 0 && arith::reduce(n, 8) == 1;
}

} // namespace

std::vector<EllPrimeDegree> l0_local_degrees_above_ell(Context const & ctx, CyclotomicPiece const & piece)
{
    auto const & k = ctx.field();
    u64 full = piece.order();
    std::vector<EllPrimeDegree> out;
    for (auto const & lambda : quad::factor_rational_prime(k, piece.ell)) {
        EllPrimeDegree rec{lambda, full, 0, true};
        if (piece.ell == 2 && lambda.type == quad::SplitType::Ramified) {
            // the quadratic subextension of L_0 at 2 is Q_2(sqrt(-2)) for r = 1,
            // Q_2(sqrt(2)) otherwise; K_lambda = Q_2(sqrt(D))
            i64 c = piece.r == 1 ? -2 : 2;
            if (is_dyadic_square(k.disc() * c)) {
                rec.local_degree = full / 2;
                rec.deficiency = 1;
            } else {
                rec.totally_ramified = false;
            }
        }
        out.push_back(rec);
    }
    return out;
}

std::optional<PrimeIdeal> CandidateEnumerator::next()
{
    for (;;) {
        if (!pending_.empty() && pending_.begin()->first < next_p_) {
            auto q = pending_.begin()->second;
            pending_.erase(pending_.begin());
            return q;
        }
        if (examined_ >= cap_)
            return std::nullopt;
        u64 p = next_p_++;
        if (!arith::is_prime(p))
            continue;
        ++examined_;
        for (auto const & q : quad::factor_rational_prime(ctx_->field(), p)) {
            if (q.type == quad::SplitType::Ramified || ctx_->is_excluded(q))
                continue;
            if (q.type == quad::SplitType::Inert && p >= (u64{1} << 31))
                continue;
            pending_.emplace(q.norm(), q);
        }
    }
}

bool satisfies(Context const & ctx, Components const & comps, std::vector<Condition> const & conditions,
               PrimeIdeal const & candidate)
{
    std::optional<bool> member;
    std::optional<RayPiece> piece;
    auto in_s = [&] {
        if (!member)
            member = in_S(ctx, candidate);
        return *member;
    };
    for (auto const & c : conditions) {
        bool ok = std::visit(
            [&](auto const & v) -> bool {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, cond::InS>) {
                    return in_s();
                } else if constexpr (std::is_same_v<T, cond::SplitsCompletelyIn>) {
                    if (v.component == 0) {
                        auto o = frobenius_order_in_L0(comps.l0, candidate, ctx.field());
                        return o && *o == 1;
                    }
                    if (v.component > comps.pieces.size())
                        throw PreconditionError("search_prime: condition refers to an unknown component");
                    return frobenius_order_in_ray_piece(ctx, comps.pieces[v.component - 1], candidate) == 1;
                } else if constexpr (std::is_same_v<T, cond::FrobeniusOrderExactly>) {
                    if (v.target == candidate || !in_s())
                        return false;
                    if (!piece)
                        piece = make_ray_piece(ctx, candidate);
                    return frobenius_order_in_ray_piece(ctx, *piece, v.target) == v.order;
                } else {
                    auto f = quad::residue_field(candidate);
                    if (quad::reduce_mod(ctx.field(), v.alpha, candidate, f) == f.zero())
                        return false;
                    return kummer_split_test(ctx, candidate, v.alpha, v.level) &&
                           !kummer_split_test(ctx, candidate, v.alpha, v.level + 1);
                }
            },
            c);
        if (!ok)
            return false;
    }
    return true;
}

PrimeIdeal search_prime(Context const & ctx, Components const & comps, std::vector<Condition> const & conditions,
                        SearchConfig const & config)
{
    if (conditions.empty())
        throw PreconditionError("search_prime: empty condition list");
    CandidateEnumerator candidates(ctx, config.cap);
    while (auto q = candidates.next()) {
        if (satisfies(ctx, comps, conditions, *q))
            return *q;
    }
    std::ostringstream msg;
    msg << "search_prime: no prime satisfies the " << conditions.size() << " conditions among the first "
        << config.cap << " rational primes";
    throw SearchExhausted(msg.str());
}

LocalDegree local_degree(Context const & ctx, Components const & comps, std::vector<EllPrimeDegree> const & ell_primes,
                         PrimeIdeal const & q)
{
    LocalDegree out;
    bool totally_ramified = true;
    std::size_t ramified_count = 0;

    if (auto o = frobenius_order_in_L0(comps.l0, q, ctx.field())) {
        out.component_orders.push_back(*o);
    } else {
        auto it = std::find_if(ell_primes.begin(), ell_primes.end(), [&](auto const & e) { return e.prime == q; });
        if (it == ell_primes.end())
            throw PreconditionError("local_degree: no record for a prime above ell");
        out.component_orders.push_back(it->local_degree);
        out.ramified_component = 0;
        totally_ramified = it->totally_ramified;
        ++ramified_count;
    }
    for (std::size_t i = 0; i < comps.pieces.size(); ++i) {
        out.component_orders.push_back(frobenius_order_in_ray_piece(ctx, comps.pieces[i], q));
        if (q == comps.pieces[i].conductor) {
            out.ramified_component = i + 1;
            ++ramified_count;
        }
    }

    u64 unramified_lcm = 1;
    for (std::size_t i = 0; i < out.component_orders.size(); ++i)
        if (!out.ramified_component || *out.ramified_component != i)
            unramified_lcm = std::lcm(unramified_lcm, out.component_orders[i]);

    if (ramified_count > 1) {
        out.well_defined = false;
        return out;
    }
    if (!out.ramified_component) {
        out.degree = unramified_lcm;
        return out;
    }
    u64 ramified = out.component_orders[*out.ramified_component];
    if (totally_ramified) {
        // decomposition group: inertia of the ramified component times the
        // Frobenius lift, whose image there lies in the inertia group
        out.degree = ramified * unramified_lcm;
    } else if (unramified_lcm == 1) {
        out.degree = ramified;
    } else {
        out.well_defined = false;
    }
    return out;
}

} // namespace cdeg::cf
