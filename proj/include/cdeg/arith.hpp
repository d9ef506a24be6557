#ifndef CDEG_ARITH_HPP
#define CDEG_ARITH_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdeg {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/* Raised when an operation is called outside its documented domain. */
class PreconditionError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

namespace arith {

inline u64 mulmod(u64 a, u64 b, u64 m)
{
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod(u64 base, u64 exp, u64 m);
u64 invmod(u64 a, u64 m);

/* Least nonnegative residue of a signed value. */
inline u64 reduce(i64 x, u64 m)
{
    i64 r = x % static_cast<i64>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

inline u64 reduce(i128 x, u64 m)
{
    i128 r = x % static_cast<i128>(m);
    return static_cast<u64>(r < 0 ? r + static_cast<i128>(m) : r);
}

/* Deterministic on the whole 64-bit range. Throws for m < 2. */
bool is_prime(u64 m);

struct PrimePower
{
    u64 prime;
    unsigned exponent;
    bool operator==(PrimePower const &) const = default;
};

using Factorization = std::vector<PrimePower>;

/* Trial division below 10^6, Pollard rho (Brent) above; the rho walk is
 * seeded from `seed`, so results are reproducible. */
Factorization factor(u64 m, u64 seed = 0x5eed);

/* Exponent of p in m (m > 0). */
unsigned valuation(u64 m, u64 p);

u64 ipow(u64 base, unsigned exp);

/* Kronecker symbol (d | p) for a prime p. */
int kronecker(i64 d, u64 p);

/* Least positive quadratic non-residue modulo an odd prime p. */
u64 least_nonresidue(u64 p);

/* An element of F_p or F_{p^2}; for degree 2 the value is c0 + c1*t with
 * t^2 = n0. Components are always reduced into [0, p). */
struct Fq
{
    u64 c0 = 0;
    u64 c1 = 0;
    bool operator==(Fq const &) const = default;
};

class ResidueField
{
    u64 p_;
    unsigned degree_;
    u64 n0_;

    ResidueField(u64 p, unsigned degree, u64 n0) : p_(p), degree_(degree), n0_(n0) {}

  public:
    static ResidueField prime_field(u64 p);
    /* F_{p^2} realized as F_p[t]/(t^2 - n0), n0 the least non-residue. */
    static ResidueField quadratic_extension(u64 p);

    u64 characteristic() const { return p_; }
    unsigned degree() const { return degree_; }
    u64 nonresidue() const { return n0_; }
    /* Cardinality Q = p^f. */
    u64 order() const { return degree_ == 1 ? p_ : p_ * p_; }

    Fq zero() const { return {}; }
    Fq one() const { return {1 % p_, 0}; }
    Fq from_int(i64 x) const { return {reduce(x, p_), 0}; }
    Fq element(u64 c0, u64 c1) const;
    bool is_canonical(Fq const & x) const;

    Fq add(Fq const & x, Fq const & y) const;
    Fq sub(Fq const & x, Fq const & y) const;
    Fq neg(Fq const & x) const;
    Fq mul(Fq const & x, Fq const & y) const;
    Fq inv(Fq const & x) const;
    Fq pow(Fq x, u64 e) const;

    /* Enumerates the field elements in a fixed order; index < order(). */
    Fq nth(u64 index) const;

    bool operator==(ResidueField const &) const = default;
};

Fq mod_pow(Fq const & base, u64 exp, ResidueField const & field);

/* Largest k <= k_max with x^((Q-1)/ell^k) = 1. Requires x != 0 and
 * ell^k_max | Q - 1. */
unsigned power_residue_level(Fq const & x, u64 ell, unsigned k_max,
                             ResidueField const & field);

/* Some y with y^ell = x; throws PreconditionError if none exists. */
Fq ell_root(Fq const & x, u64 ell, ResidueField const & field);

/* Least d >= 1 with x^d = 1. */
u64 multiplicative_order(Fq const & x, ResidueField const & field);

/* Order of x in a cyclic group of order n, given the factorization of n
 * and a power map. Shared by the finite field and Z/M code paths. */
template <typename PowFn>
u64 order_from_factorization(u64 n, Factorization const & fac, PowFn && is_identity_after)
{
    u64 d = n;
    for (auto const & [q, e] : fac) {
        for (unsigned i = 0; i < e; ++i) {
            if (is_identity_after(d / q))
                d /= q;
            else
                break;
        }
    }
    return d;
}

} // namespace arith
} // namespace cdeg

#endif /* CDEG_ARITH_HPP */
