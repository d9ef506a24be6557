#ifndef CDEG_CLASSFIELD_HPP
#define CDEG_CLASSFIELD_HPP

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "cdeg/arith.hpp"
#include "cdeg/quadfield.hpp"

namespace cdeg::cf {

using arith::Fq;
using arith::ResidueField;
using quad::BaseField;
using quad::FieldElement;
using quad::PrimeIdeal;

/* An ideal q^w (w the prime-to-ell part of h) written as
 *   q^w = (generator / denominator) * prod a_i^(exponents_i),
 * which is what the splitting map needs. Independent of any conductor. */
struct IdealLift
{
    u64 w = 1;
    std::vector<u64> exponents;
    FieldElement generator;
    i128 denominator = 1;
};

/* Everything about K, ell and r that the ray pieces share: the class
 * group, its ell-part with prime generators a_i and alpha_i, the units. */
class Context
{
    BaseField field_;
    quad::ClassGroup classes_;
    u64 ell_;
    unsigned r_;
    quad::ClassGroupLPart lpart_;
    std::vector<FieldElement> unit_gens_;
    u64 w_ = 1;
    std::vector<u64> excluded_;

    mutable std::mutex cache_mutex_;
    mutable std::map<PrimeIdeal, IdealLift> lift_cache_;

  public:
    Context(BaseField const & k, u64 ell, unsigned r, quad::ClassGroupLPart lpart);
    Context(Context const & o);

    /* Builds the ell-part basis avoiding 2*ell*D and `extra_exclusions`. */
    static Context build(BaseField const & k, u64 ell, unsigned r, std::vector<u64> const & extra_exclusions = {});

    BaseField const & field() const { return field_; }
    quad::ClassGroup const & classes() const { return classes_; }
    quad::ClassGroupLPart const & lpart() const { return lpart_; }
    std::vector<FieldElement> const & unit_gens() const { return unit_gens_; }
    u64 ell() const { return ell_; }
    unsigned r() const { return r_; }
    unsigned t() const { return lpart_.t; }
    u64 degree() const { return arith::ipow(ell_, r_); }
    /* r + t: the level of roots of unity and unit roots required in S. */
    unsigned level() const { return r_ + lpart_.t; }
    /* Prime-to-ell part of the class number. */
    u64 prime_to_ell_class_factor() const { return w_; }
    /* Rational primes never used as conductors: those dividing 2*ell*D
     * and those under the a_i. */
    std::vector<u64> const & excluded_rational_primes() const { return excluded_; }
    bool is_excluded(PrimeIdeal const & q) const;

    IdealLift const & lift(PrimeIdeal const & q) const;
};

IdealLift lift_ideal(Context const & ctx, PrimeIdeal const & q);

/* The cyclic degree-ell^r piece of the ell-ray class field of conductor
 * eps, cut out by x -> x^((Q-1)/ell^r) on (O_K/eps)^*. */
struct RayPiece
{
    PrimeIdeal conductor;
    ResidueField residue;
    /* ell^m_i-th roots of alpha_i mod eps. */
    std::vector<Fq> alpha_roots;
};

/* Throws PreconditionError if eps is excluded or not in S. */
RayPiece make_ray_piece(Context const & ctx, PrimeIdeal const & eps);

/* The seed field L_0 over Q, given by a character chi of (Z/M)^* of order
 * ell^r; odd ell: M = ell^(r+1), chi(g) = zeta for the least primitive
 * root g; ell = 2: M = 2^(r+2), chi(-1) = -1, chi(5) = zeta. */
struct CyclotomicPiece
{
    u64 ell = 2;
    unsigned r = 1;
    u64 modulus = 8;
    u64 generator = 5;
    int chi_minus_one = -1;

    u64 order() const { return arith::ipow(ell, r); }
    bool operator==(CyclotomicPiece const &) const = default;
};

CyclotomicPiece build_L0_rational(u64 ell, unsigned r);

/* chi(x) = zeta^e; returns e mod ell^r. x must be prime to ell. */
u64 chi_exponent(CyclotomicPiece const & piece, u64 x);

/* Order of Frobenius of q in K L_0 / K; nullopt when q lies above ell. */
std::optional<u64> frobenius_order_in_L0(CyclotomicPiece const & piece, PrimeIdeal const & q,
                                         BaseField const & k);

struct EllPrimeDegree
{
    PrimeIdeal prime;
    u64 local_degree = 1;
    unsigned deficiency = 0;
    /* K_lambda L_0 / K_lambda totally ramified; false only when unknown. */
    bool totally_ramified = true;
};

std::vector<EllPrimeDegree> l0_local_degrees_above_ell(Context const & ctx, CyclotomicPiece const & piece);

bool in_S(Context const & ctx, PrimeIdeal const & p);

/* f_eps applied to the ray class of q^w. Only the image under
 * x -> x^((Q-1)/ell^r) is well defined. */
Fq splitting_map_image(Context const & ctx, RayPiece const & piece, PrimeIdeal const & q);
/* Same, with caller-supplied lift and alpha roots (for choice checks). */
Fq splitting_map_image(Context const & ctx, RayPiece const & piece, IdealLift const & lift,
                       std::span<Fq const> alpha_roots);

/* Power of ell dividing ell^r: the inertia degree of q in L^eps, or ell^r
 * when q is the conductor. */
u64 frobenius_order_in_ray_piece(Context const & ctx, RayPiece const & piece, PrimeIdeal const & q);
u64 frobenius_order_of_image(Context const & ctx, RayPiece const & piece, Fq const & image);

/* P splits completely in K(mu_{ell^k}, alpha^(1/ell^k)). */
bool kummer_split_test(Context const & ctx, PrimeIdeal const & p, FieldElement const & alpha, unsigned k);

/* L_0 followed by the ray pieces L_1, L_2, ...; component index 0 is L_0. */
struct Components
{
    CyclotomicPiece l0;
    std::vector<RayPiece> pieces;
};

namespace cond {
struct InS
{
    bool operator==(InS const &) const = default;
};
struct SplitsCompletelyIn
{
    std::size_t component;
    bool operator==(SplitsCompletelyIn const &) const = default;
};
/* Frobenius of target in the candidate's piece has exactly this order;
 * never satisfied when the target is the candidate itself. */
struct FrobeniusOrderExactly
{
    PrimeIdeal target;
    u64 order;
    bool operator==(FrobeniusOrderExactly const &) const = default;
};
struct KummerSplitExactLevel
{
    FieldElement alpha;
    unsigned level;
    bool operator==(KummerSplitExactLevel const &) const = default;
};
} // namespace cond

using Condition = std::variant<cond::InS, cond::SplitsCompletelyIn, cond::FrobeniusOrderExactly,
                               cond::KummerSplitExactLevel>;

struct SearchConfig
{
    /* Number of rational primes examined before giving up. */
    u64 cap = 100000;
};

/* Candidate conductors in canonical order: ascending norm, conjugates by
 * root; skipping ramified and excluded primes. */
class CandidateEnumerator
{
    Context const * ctx_;
    u64 cap_;
    u64 next_p_ = 2;
    u64 examined_ = 0;
    std::multimap<u64, PrimeIdeal> pending_;

  public:
    CandidateEnumerator(Context const & ctx, u64 cap) : ctx_(&ctx), cap_(cap) {}
    std::optional<PrimeIdeal> next();
};

bool satisfies(Context const & ctx, Components const & comps, std::vector<Condition> const & conditions,
               PrimeIdeal const & candidate);

/* First candidate satisfying every condition; SearchExhausted past the cap. */
PrimeIdeal search_prime(Context const & ctx, Components const & comps, std::vector<Condition> const & conditions,
                        SearchConfig const & config = {});

struct LocalDegree
{
    u64 degree = 0;
    /* 0 for L_0, i for the i-th ray piece; nullopt if unramified. */
    std::optional<std::size_t> ramified_component;
    /* Frobenius order (or local degree, if ramified) per component. */
    std::vector<u64> component_orders;
    /* More than one ramified component, or an undetermined split of e and f. */
    bool well_defined = true;
};

/* Local degree of L_0 L_1 ... L_k / K at q. */
LocalDegree local_degree(Context const & ctx, Components const & comps, std::vector<EllPrimeDegree> const & ell_primes,
                         PrimeIdeal const & q);

} // namespace cdeg::cf

#endif /* CDEG_CLASSFIELD_HPP */
