#ifndef CDEG_CONSTRUCTOR_HPP
#define CDEG_CONSTRUCTOR_HPP

#include <optional>
#include <vector>

#include "cdeg/classfield.hpp"

namespace cdeg::cons {

using cf::Condition;
using quad::BaseField;
using quad::FieldElement;
using quad::PrimeIdeal;

struct ConstructConfig
{
    u64 cap = 100000;
    /* Skip primes that already have full local degree. */
    bool greedy_skip = true;
    /* Recorded only; the construction is deterministic. */
    u64 seed = 0x5eed;
};

struct Deficiency
{
    PrimeIdeal prime;
    unsigned deficiency = 0;
};

struct PieceRecord
{
    PrimeIdeal conductor;
    /* The condition list the conductor was searched with. */
    std::vector<Condition> conditions;
};

struct TableEntry
{
    PrimeIdeal prime;
    u64 degree = 0;
    std::optional<std::size_t> ramified_component;
};

struct ExtensionCertificate
{
    BaseField field = BaseField::rational();
    u64 ell = 2;
    unsigned r = 1;
    unsigned t = 0;
    quad::ClassGroupLPart class_data;
    std::vector<FieldElement> unit_gens;
    cf::CyclotomicPiece l0;
    std::vector<Deficiency> deficiencies;
    std::vector<PieceRecord> pieces;
    u64 bound = 2;
    std::vector<TableEntry> table;
    /* Only for K = Q and ell = 2. */
    std::optional<u64> real_place_degree;
    ConstructConfig config;

    u64 degree() const { return arith::ipow(ell, r); }
};

struct CompositeEntry
{
    PrimeIdeal prime;
    u64 degree = 0;
};

struct CompositeCertificate
{
    u64 n = 2;
    std::vector<ExtensionCertificate> components;
    std::vector<CompositeEntry> table;
};

/* A cyclic-piece composite of degree ell^r over K with local degree ell^r
 * at every prime of norm <= bound. */
ExtensionCertificate construct(BaseField const & k, u64 ell, unsigned r, u64 bound, ConstructConfig const & config = {});

/* One certificate per prime power of n, combined table all n. */
CompositeCertificate compose_for_n(BaseField const & k, u64 n, u64 bound, ConstructConfig const & config = {});

} // namespace cdeg::cons

#endif /* CDEG_CONSTRUCTOR_HPP */
