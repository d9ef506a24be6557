#include "cdeg/constructor.hpp"

#include <algorithm>
#include <sstream>

namespace cdeg::cons {

namespace {

bool contains(std::vector<PrimeIdeal> const & v, PrimeIdeal const & q)
{
    return std::find(v.begin(), v.end(), q) != v.end();
}

std::vector<Condition> base_conditions(cf::Components const & comps, std::vector<PrimeIdeal> const & special,
                                       PrimeIdeal const * skip)
{
    std::vector<Condition> out{cf::cond::InS{}, cf::cond::SplitsCompletelyIn{0}};
    for (std::size_t j = 1; j <= comps.pieces.size(); ++j)
        out.push_back(cf::cond::SplitsCompletelyIn{j});
    for (auto const & s : special)
        if (!skip || !(s == *skip))
            out.push_back(cf::cond::FrobeniusOrderExactly{s, 1});
    return out;
}

PrimeIdeal search(cf::Context const & ctx, cf::Components const & comps, std::vector<Condition> const & conds,
                  ConstructConfig const & config, PrimeIdeal const & target)
{
    try {
        return cf::search_prime(ctx, comps, conds, {config.cap});
    } catch (SearchExhausted const & e) {
        std::ostringstream msg;
        msg << e.what() << " (conductor for " << target << " with " << comps.pieces.size() << " earlier pieces)";
        throw SearchExhausted(msg.str());
    }
}

} // namespace

ExtensionCertificate construct(BaseField const & k, u64 ell, unsigned r, u64 bound, ConstructConfig const & config)
{
    if (bound < 2)
        throw PreconditionError("construct: bound must be >= 2");
    auto ctx = cf::Context::build(k, ell, r);

    ExtensionCertificate cert;
    cert.field = k;
    cert.ell = ell;
    cert.r = r;
    cert.t = ctx.t();
    cert.class_data = ctx.lpart();
    cert.unit_gens = ctx.unit_gens();
    cert.bound = bound;
    cert.config = config;

    cf::Components comps{cf::build_L0_rational(ell, r), {}};
    cert.l0 = comps.l0;
    auto ell_primes = cf::l0_local_degrees_above_ell(ctx, comps.l0);

    std::vector<PrimeIdeal> special;
    for (auto const & e : ell_primes)
        special.push_back(e.prime);

    auto add_piece = [&](PrimeIdeal const & eps, std::vector<Condition> conds) {
        comps.pieces.push_back(cf::make_ray_piece(ctx, eps));
        cert.pieces.push_back({eps, std::move(conds)});
        special.push_back(eps);
    };

    // primes above ell where L_0 falls short: an unramified piece supplies the rest
    for (auto const & e : ell_primes) {
        if (e.deficiency == 0)
            continue;
        cert.deficiencies.push_back({e.prime, e.deficiency});
        auto conds = base_conditions(comps, special, &e.prime);
        conds.push_back(cf::cond::FrobeniusOrderExactly{e.prime, arith::ipow(ell, e.deficiency)});
        auto eps = search(ctx, comps, conds, config, e.prime);
        add_piece(eps, std::move(conds));
    }

    auto primes = quad::primes_up_to(k, bound);
    for (auto const & q : primes) {
        if (contains(special, q))
            continue;
        auto ld = cf::local_degree(ctx, comps, ell_primes, q);
        if (config.greedy_skip && ld.well_defined && ld.degree == ctx.degree())
            continue;
        auto conds = base_conditions(comps, special, nullptr);
        conds.push_back(cf::cond::FrobeniusOrderExactly{q, ctx.degree()});
        auto eps = search(ctx, comps, conds, config, q);
        add_piece(eps, std::move(conds));
    }

    for (std::size_t i = 0; i < comps.pieces.size(); ++i) {
        auto const & eps = comps.pieces[i].conductor;
        if (cf::frobenius_order_in_L0(comps.l0, eps, k) != u64{1})
            throw InternalInconsistency("construct: a conductor does not split in L_0");
        for (std::size_t j = 0; j < comps.pieces.size(); ++j)
            if (j != i && cf::frobenius_order_in_ray_piece(ctx, comps.pieces[j], eps) != 1)
                throw InternalInconsistency("construct: a conductor does not split in another piece");
    }

    for (auto const & q : primes) {
        auto ld = cf::local_degree(ctx, comps, ell_primes, q);
        if (!ld.well_defined || ld.degree != ctx.degree()) {
            std::ostringstream msg;
            msg << "construct: local degree at " << q << " is " << ld.degree << ", expected " << ctx.degree();
            throw InternalInconsistency(msg.str());
        }
        cert.table.push_back({q, ld.degree, ld.ramified_component});
    }

    if (k.is_rational() && ell == 2) {
        cert.real_place_degree = comps.l0.chi_minus_one == -1 ? 2 : 1;
        if (*cert.real_place_degree != 2)
            throw InternalInconsistency("construct: L_0 is real");
    }
    return cert;
}

CompositeCertificate compose_for_n(BaseField const & k, u64 n, u64 bound, ConstructConfig const & config)
{
    if (n < 2)
        throw PreconditionError("compose_for_n: n must be >= 2");
    CompositeCertificate out;
    out.n = n;
    for (auto const & pe : arith::factor(n))
        out.components.push_back(construct(k, pe.prime, pe.exponent, bound, config));

    auto const & first = out.components.front().table;
    for (std::size_t i = 0; i < first.size(); ++i) {
        u64 d = 1;
        for (auto const & c : out.components) {
            if (!(c.table.at(i).prime == first[i].prime))
                throw InternalInconsistency("compose_for_n: component tables list different primes");
            d *= c.table[i].degree;
        }
        if (d != n)
            throw InternalInconsistency("compose_for_n: combined degree differs from n");
        out.table.push_back({first[i].prime, d});
    }
    return out;
}

} // namespace cdeg::cons
