#ifndef CDEG_QUADFIELD_HPP
#define CDEG_QUADFIELD_HPP

#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdeg/arith.hpp"

namespace cdeg {

/* A bounded search ran out of candidates. The message names what was
 * being searched for. */
class SearchExhausted : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/* A computed object failed a self-check that holds by construction. */
class InternalInconsistency : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

namespace quad {

bool is_fundamental_discriminant(i64 d);

/* Q, or an imaginary quadratic field given by its fundamental
 * discriminant D < 0. */
class BaseField
{
    i64 disc_ = 0;

    explicit BaseField(i64 d) : disc_(d) {}

  public:
    static BaseField rational() { return BaseField(0); }
    /* Throws PreconditionError unless d is a negative fundamental
     * discriminant. */
    static BaseField imaginary_quadratic(i64 d);

    bool is_rational() const { return disc_ == 0; }
    i64 disc() const { return disc_; }
    /* Size of the unit group: 2, 4 or 6. */
    unsigned unit_count() const;

    bool operator==(BaseField const &) const = default;
};

std::ostream & operator<<(std::ostream & o, BaseField const & k);

/* (x + y sqrt(D)) / 2 with x = yD (mod 2). Over Q, y = 0 and x is even. */
struct FieldElement
{
    i64 x = 2;
    i64 y = 0;

    static FieldElement integer(i64 n) { return {2 * n, 0}; }
    bool operator==(FieldElement const &) const = default;
};

FieldElement multiply(BaseField const & k, FieldElement const & u, FieldElement const & v);
FieldElement power(BaseField const & k, FieldElement u, u64 e);
FieldElement conjugate(FieldElement const & u);
i128 norm(BaseField const & k, FieldElement const & u);
bool is_valid(BaseField const & k, FieldElement const & u);

enum class SplitType { Rational, Split, Inert, Ramified };

char const * to_string(SplitType t);

/* A finite prime of K. For split and ramified primes `root` is the b in
 * [0, 2p) with b^2 = D (mod 4p) and b = D (mod 2); the prime is the
 * kernel of sqrt(D) -> b. Inert and rational primes carry root = -1. */
struct PrimeIdeal
{
    u64 p = 0;
    SplitType type = SplitType::Rational;
    i64 root = -1;

    unsigned residue_degree() const { return type == SplitType::Inert ? 2 : 1; }
    u64 norm() const { return type == SplitType::Inert ? p * p : p; }
    bool has_root() const { return root >= 0; }

    /* Ascending norm, then rational prime, then root. */
    auto operator<=>(PrimeIdeal const & o) const
    {
        if (auto c = norm() <=> o.norm(); c != 0)
            return c;
        if (auto c = p <=> o.p; c != 0)
            return c;
        return root <=> o.root;
    }
    bool operator==(PrimeIdeal const & o) const { return p == o.p && root == o.root; }
};

std::ostream & operator<<(std::ostream & o, PrimeIdeal const & q);

/* Primes of K above the rational prime p, conjugates ordered by root. */
std::vector<PrimeIdeal> factor_rational_prime(BaseField const & k, u64 p);

/* All primes of K of norm <= bound, in canonical order. */
std::vector<PrimeIdeal> primes_up_to(BaseField const & k, u64 bound);

/* content * (a Z + (b + sqrt D)/2 Z), a > 0, 0 <= b < 2a, 4a | b^2 - D.
 * Over Q only the content is meaningful (a = 1, b = 0). */
struct QuadIdeal
{
    i64 content = 1;
    i64 a = 1;
    i64 b = 0;

    i128 norm() const { return static_cast<i128>(content) * content * a; }
    bool operator==(QuadIdeal const &) const = default;
};

QuadIdeal unit_ideal(BaseField const & k);
QuadIdeal ideal_of(BaseField const & k, PrimeIdeal const & q);
QuadIdeal multiply(BaseField const & k, QuadIdeal const & i, QuadIdeal const & j);
QuadIdeal power(BaseField const & k, QuadIdeal const & i, u64 e);
QuadIdeal conjugate(BaseField const & k, QuadIdeal const & i);
bool contains(BaseField const & k, QuadIdeal const & i, FieldElement const & u);

struct BinaryQuadraticForm
{
    i64 a = 1;
    i64 b = 0;
    i64 c = 0;

    i64 discriminant() const { return b * b - 4 * a * c; }
    bool is_reduced() const;
    auto operator<=>(BinaryQuadraticForm const &) const = default;
};

std::ostream & operator<<(std::ostream & o, BinaryQuadraticForm const & f);

BinaryQuadraticForm reduce_form(BinaryQuadraticForm f);
BinaryQuadraticForm compose_forms(BinaryQuadraticForm const & f, BinaryQuadraticForm const & g);
BinaryQuadraticForm principal_form(i64 d);
BinaryQuadraticForm inverse_form(BinaryQuadraticForm const & f);
/* Reduced form of the class of the ideal (content is ignored). */
BinaryQuadraticForm form_of(BaseField const & k, QuadIdeal const & i);

/* The ideal class group as an explicit list of reduced forms. Over Q this
 * is the trivial group with an empty form list. */
class ClassGroup
{
    BaseField field_;
    std::vector<BinaryQuadraticForm> forms_;

  public:
    explicit ClassGroup(BaseField const & k);

    BaseField const & field() const { return field_; }
    std::vector<BinaryQuadraticForm> const & forms() const { return forms_; }
    u64 class_number() const { return field_.is_rational() ? 1 : forms_.size(); }

    BinaryQuadraticForm identity() const;
    BinaryQuadraticForm compose(BinaryQuadraticForm const & f, BinaryQuadraticForm const & g) const;
    BinaryQuadraticForm pow(BinaryQuadraticForm const & f, u64 e) const;
    u64 order(BinaryQuadraticForm const & f) const;
    BinaryQuadraticForm class_of(QuadIdeal const & i) const;
    BinaryQuadraticForm class_of(PrimeIdeal const & q) const;
};

/* Reduced forms of discriminant D; over Q returns an empty list. */
ClassGroup enumerate_class_group(BaseField const & k);

/* ell-primary class group with prime-ideal basis a_i, a_i^(ell^m_i) = (alpha_i). */
struct ClassGroupLPart
{
    u64 ell = 2;
    std::vector<PrimeIdeal> generators;
    std::vector<unsigned> exponents;
    std::vector<FieldElement> alphas;
    unsigned t = 0;

    std::size_t rank() const { return generators.size(); }
    u64 order() const;
};

/* Rational primes dividing 2 * ell * D are always excluded in addition to
 * `excluded`. Throws SearchExhausted if no basis is found among primes
 * below `prime_cap`. */
ClassGroupLPart class_group_l_part(BaseField const & k, ClassGroup const & cl, u64 ell,
                                   std::vector<u64> const & excluded, u64 prime_cap = 100000);

/* Exponents c_i in [0, ell^m_i) such that i * prod a_i^(-c_i) has class of
 * order prime to ell. */
std::vector<u64> class_dlog(ClassGroup const & cl, QuadIdeal const & i, ClassGroupLPart const & basis);

/* A generator of the ideal, normalized over the unit group; nullopt if
 * the ideal is not principal. */
std::optional<FieldElement> principal_generator(BaseField const & k, QuadIdeal const & i);

/* Canonical unit multiple of u: the one of least argument in [0, 2pi). */
FieldElement normalize_by_units(BaseField const & k, FieldElement const & u);

std::vector<FieldElement> unit_generators(BaseField const & k);
/* All units, starting from 1. */
std::vector<FieldElement> units(BaseField const & k);

arith::ResidueField residue_field(PrimeIdeal const & q);

/* Image of u in the residue field of q. For inert q, sqrt(D) maps to s*t
 * with s the smaller root of s^2 = D / n0. */
arith::Fq reduce_mod(BaseField const & k, FieldElement const & u, PrimeIdeal const & q,
                     arith::ResidueField const & field);

} // namespace quad
} // namespace cdeg

#endif /* CDEG_QUADFIELD_HPP */
