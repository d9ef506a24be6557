#ifndef CDEG_VERIFIER_HPP
#define CDEG_VERIFIER_HPP

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdeg/certificate.hpp"

namespace cdeg::verify {

using quad::PrimeIdeal;

/* One recomputed row of the local-degree table. */
struct PrimeRecord
{
    PrimeIdeal prime;
    std::vector<u64> component_orders;
    u64 recomputed = 0;
    std::optional<std::size_t> ramified_component;
    std::optional<u64> claimed;
    std::optional<std::size_t> claimed_ramified_component;
    bool ok = false;
    std::string note;
};

/* A check on the certificate data other than a table row. */
struct CheckRecord
{
    std::string name;
    bool ok = false;
    std::string detail;
};

struct VerificationReport
{
    u64 degree = 0;
    u64 bound = 0;
    std::vector<CheckRecord> checks;
    std::vector<PrimeRecord> primes;
    std::optional<u64> real_place_claimed;
    std::optional<u64> real_place_recomputed;
    bool real_place_ok = true;
    /* Per-factor reports of a composite certificate. */
    std::vector<VerificationReport> components;
    bool verdict = false;
    double seconds = 0;

    std::vector<std::string> failures() const;
};

/* Recomputes every local degree from the certificate data alone. `bound`
 * defaults to the certificate's bound and may not exceed it
 * (PreconditionError). Content mismatches are reported, not thrown. */
VerificationReport verify(cert::Certificate const & c, std::optional<u64> bound = std::nullopt);

void print_report(std::ostream & o, VerificationReport const & report);

/* ---- quaternion algebras over Q */

/* Place 0 stands for the real place. */
inline constexpr u64 real_place = 0;

/* (a, b)_v for nonzero integers (rational parameters enter through their
 * square class num * den). */
int hilbert_symbol(i64 a, i64 b, u64 place);

/* Places where (a, b) is ramified: the real place first, then primes in
 * increasing order. Throws InternalInconsistency if reciprocity fails. */
std::vector<u64> ramified_places(i64 a, i64 b);

struct QuaternionAlgebra
{
    i64 a;
    i64 b;

    QuaternionAlgebra(i64 a_, i64 b_);
};

class RamifiedPlaceOutOfRange : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct BrauerSplitResult
{
    bool splits = false;
    std::vector<u64> ramified;
    /* Ramified places where the claimed local degree is odd. */
    std::vector<u64> uncovered;
};

/* Whether the certified extension splits the algebra, judged from the
 * certificate's claimed local degrees. Needs K = Q and ell = 2. */
BrauerSplitResult brauer_split_check(cons::ExtensionCertificate const & c, QuaternionAlgebra const & algebra);

} // namespace cdeg::verify

#endif /* CDEG_VERIFIER_HPP */
