#include "cdeg/verifier.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

namespace cdeg::verify {

using cons::CompositeCertificate;
using cons::ExtensionCertificate;
using quad::BaseField;

namespace {

std::string str(PrimeIdeal const & q)
{
    std::ostringstream o;
    o << q;
    return o.str();
}

struct Checker
{
    VerificationReport & report;

    bool operator()(std::string name, bool ok, std::string detail = {})
    {
        report.checks.push_back({std::move(name), ok, std::move(detail)});
        return ok;
    }
};

// The ell-part data: generators independent and spanning the Sylow
// subgroup, alpha_i generating a_i^(ell^m_i).
bool check_class_data(ExtensionCertificate const & c, quad::ClassGroup const & cl, Checker & check)
{
    auto const & k = c.field;
    auto const & lp = c.class_data;
    bool ok = true;
    unsigned t = 0;
    for (std::size_t i = 0; i < lp.rank(); ++i) {
        auto const & a = lp.generators[i];
        std::string name = "class_data[" + std::to_string(i) + "]";
        u64 order = arith::ipow(c.ell, lp.exponents[i]);
        t = std::max(t, lp.exponents[i]);
        bool avoids = a.p != 2 && a.p != c.ell && a.type != quad::SplitType::Ramified;
        ok &= check(name + " prime avoids 2*ell*D", avoids, str(a));
        ok &= check(name + " class order", lp.exponents[i] >= 1 && cl.order(cl.class_of(a)) == order,
                    "claimed " + std::to_string(order) + ", actual " + std::to_string(cl.order(cl.class_of(a))));
        auto ideal = quad::power(k, quad::ideal_of(k, a), order);
        bool gen = quad::contains(k, ideal, lp.alphas[i]) && quad::norm(k, lp.alphas[i]) == ideal.norm();
        ok &= check(name + " alpha generates a^order", gen);
    }
    ok &= check("t is the exponent of the ell-part", t == c.t);

    u64 h = cl.class_number(), sylow = 1;
    while (h % c.ell == 0) {
        h /= c.ell;
        sylow *= c.ell;
    }
    std::set<quad::BinaryQuadraticForm> span{cl.identity()};
    for (auto const & a : lp.generators) {
        auto g = cl.class_of(a);
        std::set<quad::BinaryQuadraticForm> next;
        for (auto const & f : span) {
            auto x = f;
            do {
                next.insert(x);
                x = cl.compose(x, g);
            } while (x != f);
        }
        span = std::move(next);
    }
    ok &= check("class_data spans the ell-part", span.size() == sylow && lp.order() == sylow,
                "subgroup " + std::to_string(span.size()) + ", ell-part " + std::to_string(sylow));
    return ok;
}

void recompute_extension(ExtensionCertificate const & c, VerificationReport & report)
{
    Checker check{report};
    auto const & k = c.field;
    u64 deg = c.degree();

    quad::ClassGroup cl(k);
    bool structure = check_class_data(c, cl, check);
    structure &= check("unit generators", c.unit_gens == quad::unit_generators(k));
    auto l0 = cf::build_L0_rational(c.ell, c.r);
    structure &= check("L0 character", c.l0 == l0, "modulus " + std::to_string(c.l0.modulus));
    if (!structure)
        return;

    cf::Context ctx(k, c.ell, c.r, c.class_data);
    auto ell_primes = cf::l0_local_degrees_above_ell(ctx, l0);
    std::vector<cons::Deficiency> defs;
    for (auto const & e : ell_primes)
        if (e.deficiency)
            defs.push_back({e.prime, e.deficiency});
    bool same_defs = defs.size() == c.deficiencies.size() &&
                     std::equal(defs.begin(), defs.end(), c.deficiencies.begin(), [](auto const & x, auto const & y) {
                         return x.prime == y.prime && x.deficiency == y.deficiency;
                     });
    check("deficiencies", same_defs);

    cf::Components comps{l0, {}};
    for (std::size_t i = 0; i < c.pieces.size(); ++i) {
        auto const & rec = c.pieces[i];
        std::string name = "piece[" + std::to_string(i) + "] " + str(rec.conductor);
        if (ctx.is_excluded(rec.conductor) || rec.conductor.type == quad::SplitType::Ramified ||
            !check(name + " in S", cf::in_S(ctx, rec.conductor))) {
            check(name + " admissible conductor", false);
            return;
        }
        // the conductor must be the first match for its recorded conditions
        std::string detail;
        bool first = false;
        try {
            auto found = cf::search_prime(ctx, comps, rec.conditions, {c.config.cap});
            first = found == rec.conductor;
            detail = "search gives " + str(found);
        } catch (SearchExhausted const &) {
            detail = "search exhausted";
        } catch (PreconditionError const & e) {
            detail = e.what();
        }
        check(name + " first match", first, detail);
        comps.pieces.push_back(cf::make_ray_piece(ctx, rec.conductor));
    }
    for (std::size_t i = 0; i < comps.pieces.size(); ++i)
        for (std::size_t j = i + 1; j < comps.pieces.size(); ++j)
            check("conductors distinct", !(comps.pieces[i].conductor == comps.pieces[j].conductor));

    auto primes = quad::primes_up_to(k, c.bound);
    bool covered = primes.size() == c.table.size();
    for (std::size_t i = 0; covered && i < primes.size(); ++i)
        covered = primes[i] == c.table[i].prime;
    check("table lists every prime of norm <= bound", covered,
          std::to_string(c.table.size()) + " rows, " + std::to_string(primes.size()) + " primes");

    for (std::size_t i = 0; i < primes.size() && primes[i].norm() <= report.bound; ++i) {
        PrimeRecord rec;
        rec.prime = primes[i];
        auto ld = cf::local_degree(ctx, comps, ell_primes, rec.prime);
        rec.component_orders = ld.component_orders;
        rec.recomputed = ld.degree;
        rec.ramified_component = ld.ramified_component;
        if (i < c.table.size() && c.table[i].prime == rec.prime) {
            rec.claimed = c.table[i].degree;
            rec.claimed_ramified_component = c.table[i].ramified_component;
        }
        if (!ld.well_defined)
            rec.note = "local degree not determined by the component data";
        else if (!rec.claimed)
            rec.note = "no table row";
        else if (*rec.claimed != rec.recomputed)
            rec.note = "claimed " + std::to_string(*rec.claimed) + ", recomputed " + std::to_string(rec.recomputed);
        else if (rec.recomputed != deg)
            rec.note = "degree differs from ell^r";
        else if (rec.claimed_ramified_component != rec.ramified_component)
            rec.note = "ramified component differs";
        rec.ok = rec.note.empty();
        report.primes.push_back(std::move(rec));
    }

    report.real_place_claimed = c.real_place_degree;
    if (k.is_rational() && c.ell == 2) {
        report.real_place_recomputed = l0.chi_minus_one == -1 ? 2 : 1;
        report.real_place_ok = c.real_place_degree == report.real_place_recomputed && *report.real_place_recomputed == 2;
    } else {
        report.real_place_ok = !c.real_place_degree;
    }
}

bool all_pass(VerificationReport const & r)
{
    return r.real_place_ok && std::all_of(r.checks.begin(), r.checks.end(), [](auto const & x) { return x.ok; }) &&
           std::all_of(r.primes.begin(), r.primes.end(), [](auto const & x) { return x.ok; }) &&
           std::all_of(r.components.begin(), r.components.end(), [](auto const & x) { return x.verdict; });
}

VerificationReport verify_extension(ExtensionCertificate const & c, std::optional<u64> bound)
{
    VerificationReport report;
    report.degree = c.degree();
    report.bound = bound.value_or(c.bound);
    if (report.bound > c.bound)
        throw PreconditionError("verify: bound exceeds the certificate's coverage bound");
    try {
        recompute_extension(c, report);
    } catch (std::exception const & e) {
        // certificate data that the recomputation cannot even evaluate
        report.checks.push_back({"recomputation", false, e.what()});
    }
    report.verdict = all_pass(report);
    return report;
}

VerificationReport verify_composite(CompositeCertificate const & c, std::optional<u64> bound)
{
    VerificationReport report;
    report.degree = c.n;
    Checker check{report};
    u64 prod = 1;
    std::set<u64> ells;
    u64 common_bound = c.components.front().bound;
    for (auto const & comp : c.components) {
        prod *= comp.degree();
        ells.insert(comp.ell);
        common_bound = std::min(common_bound, comp.bound);
    }
    report.bound = bound.value_or(common_bound);
    if (report.bound > common_bound)
        throw PreconditionError("verify: bound exceeds the certificate's coverage bound");
    check("components have distinct primes", ells.size() == c.components.size());
    check("product of component degrees is n", prod == c.n,
          std::to_string(prod) + " vs " + std::to_string(c.n));

    for (auto const & comp : c.components)
        report.components.push_back(verify_extension(comp, report.bound));

    auto primes = quad::primes_up_to(c.components.front().field, report.bound);
    for (std::size_t i = 0; i < primes.size(); ++i) {
        PrimeRecord rec;
        rec.prime = primes[i];
        rec.recomputed = 1;
        for (auto const & sub : report.components) {
            auto it = std::find_if(sub.primes.begin(), sub.primes.end(),
                                   [&](auto const & x) { return x.prime == rec.prime; });
            u64 d = it == sub.primes.end() ? 0 : it->recomputed;
            rec.component_orders.push_back(d);
            rec.recomputed *= d;
        }
        if (i < c.table.size() && c.table[i].prime == rec.prime)
            rec.claimed = c.table[i].degree;
        if (!rec.claimed)
            rec.note = "no table row";
        else if (*rec.claimed != rec.recomputed || rec.recomputed != c.n)
            rec.note = "claimed " + std::to_string(*rec.claimed) + ", recomputed " + std::to_string(rec.recomputed);
        rec.ok = rec.note.empty();
        report.primes.push_back(std::move(rec));
    }
    check("combined table length", c.table.size() >= primes.size());
    return report;
}

} // namespace

std::vector<std::string> VerificationReport::failures() const
{
    std::vector<std::string> out;
    for (auto const & c : checks)
        if (!c.ok)
            out.push_back(c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
    for (auto const & p : primes)
        if (!p.ok)
            out.push_back(str(p.prime) + ": " + p.note);
    if (!real_place_ok)
        out.push_back("real place: claimed " +
                      (real_place_claimed ? std::to_string(*real_place_claimed) : std::string("null")) +
                      ", recomputed " +
                      (real_place_recomputed ? std::to_string(*real_place_recomputed) : std::string("n/a")));
    for (std::size_t i = 0; i < components.size(); ++i)
        for (auto const & f : components[i].failures())
            out.push_back("component " + std::to_string(i) + ": " + f);
    return out;
}

VerificationReport verify(cert::Certificate const & c, std::optional<u64> bound)
{
    auto start = std::chrono::steady_clock::now();
    VerificationReport report = std::holds_alternative<ExtensionCertificate>(c)
                                    ? verify_extension(std::get<ExtensionCertificate>(c), bound)
                                    : verify_composite(std::get<CompositeCertificate>(c), bound);
    report.verdict = all_pass(report);
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void print_report(std::ostream & o, VerificationReport const & report)
{
    o << "degree " << report.degree << ", bound " << report.bound << "\n";
    o << std::left << std::setw(16) << "prime" << std::setw(20) << "components" << std::right << std::setw(8)
      << "local" << std::setw(8) << "claim" << "  result\n";
    for (auto const & p : report.primes) {
        std::string orders;
        for (std::size_t i = 0; i < p.component_orders.size(); ++i) {
            if (i)
                orders += ",";
            orders += std::to_string(p.component_orders[i]);
            if (p.ramified_component == i)
                orders += "r";
        }
        o << std::left << std::setw(16) << str(p.prime) << std::setw(20) << orders << std::right << std::setw(8)
          << p.recomputed << std::setw(8) << (p.claimed ? std::to_string(*p.claimed) : "-") << "  "
          << (p.ok ? "ok" : "FAIL " + p.note) << "\n";
    }
    if (report.real_place_recomputed || report.real_place_claimed)
        o << std::left << std::setw(36) << "real" << std::right << std::setw(8)
          << (report.real_place_recomputed ? std::to_string(*report.real_place_recomputed) : "-") << std::setw(8)
          << (report.real_place_claimed ? std::to_string(*report.real_place_claimed) : "-") << "  "
          << (report.real_place_ok ? "ok" : "FAIL") << "\n";
    for (auto const & f : report.failures())
        o << "failure: " << f << "\n";
    o << (report.verdict ? "PASS" : "FAIL") << " (" << std::fixed << std::setprecision(3) << report.seconds << " s)\n";
}

// ---- Hilbert symbols

int hilbert_symbol(i64 a, i64 b, u64 place)
{
    if (a == 0 || b == 0)
        throw PreconditionError("hilbert_symbol: arguments must be nonzero");
    if (place == real_place)
        return a < 0 && b < 0 ? -1 : 1;
    if (!arith::is_prime(place))
        throw PreconditionError("hilbert_symbol: place must be prime or real");
    i64 p = static_cast<i64>(place);
    unsigned alpha = 0, beta = 0;
    while (a % p == 0) {
        a /= p;
        ++alpha;
    }
    while (b % p == 0) {
        b /= p;
        ++beta;
    }
    auto eps = [](i64 u) { return static_cast<int>(((arith::reduce(u, 8) - 1) / 2) % 2); };
    auto omega = [](i64 u) {
        u64 m = arith::reduce(u, 8);
        return static_cast<int>(((m * m - 1) / 8) % 2);
    };
    int e;
    if (p == 2) {
        e = eps(a) * eps(b) + static_cast<int>(alpha) * omega(b) + static_cast<int>(beta) * omega(a);
        return e % 2 ? -1 : 1;
    }
    e = (alpha * beta % 2) * static_cast<int>(((place - 1) / 2) % 2);
    int s = e % 2 ? -1 : 1;
    if (beta % 2)
        s *= arith::kronecker(a, place);
    if (alpha % 2)
        s *= arith::kronecker(b, place);
    return s;
}

std::vector<u64> ramified_places(i64 a, i64 b)
{
    if (a == 0 || b == 0)
        throw PreconditionError("ramified_places: arguments must be nonzero");
    std::set<u64> candidates{2};
    for (i64 v : {a, b})
        for (auto const & pe : arith::factor(static_cast<u64>(v < 0 ? -v : v)))
            candidates.insert(pe.prime);
    std::vector<u64> out;
    if (hilbert_symbol(a, b, real_place) == -1)
        out.push_back(real_place);
    for (u64 p : candidates)
        if (hilbert_symbol(a, b, p) == -1)
            out.push_back(p);
    if (out.size() % 2)
        throw InternalInconsistency("ramified_places: Hilbert reciprocity fails");
    return out;
}

QuaternionAlgebra::QuaternionAlgebra(i64 a_, i64 b_) : a(a_), b(b_)
{
    if (a == 0 || b == 0)
        throw PreconditionError("QuaternionAlgebra: parameters must be nonzero");
}

BrauerSplitResult brauer_split_check(ExtensionCertificate const & c, QuaternionAlgebra const & algebra)
{
    if (!c.field.is_rational() || c.ell != 2)
        throw PreconditionError("brauer_split_check: needs a certificate over Q with ell = 2");
    BrauerSplitResult out;
    out.ramified = ramified_places(algebra.a, algebra.b);
    for (u64 v : out.ramified) {
        u64 degree = 0;
        if (v == real_place) {
            degree = c.real_place_degree.value_or(1);
        } else {
            if (v > c.bound)
                throw RamifiedPlaceOutOfRange("brauer_split_check: algebra ramified at " + std::to_string(v) +
                                              ", beyond the certificate bound");
            auto it = std::find_if(c.table.begin(), c.table.end(), [&](auto const & e) { return e.prime.p == v; });
            if (it == c.table.end())
                throw RamifiedPlaceOutOfRange("brauer_split_check: no table row for " + std::to_string(v));
            degree = it->degree;
        }
        if (degree % 2)
            out.uncovered.push_back(v);
    }
    out.splits = out.uncovered.empty();
    return out;
}

} // namespace cdeg::verify
