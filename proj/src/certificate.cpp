#include "cdeg/certificate.hpp"

#include <sstream>

#include "json.hpp"

namespace cdeg::cert {

using json = nlohmann::ordered_json;
using cons::CompositeCertificate;
using cons::ExtensionCertificate;
using quad::BaseField;
using quad::FieldElement;
using quad::PrimeIdeal;

namespace {

[[noreturn]] void malformed(std::string const & where, std::string const & what)
{
    throw MalformedCertificate(where + ": " + what);
}

// ---- writing

json prime_json(PrimeIdeal const & q)
{
    return json::array({q.p, q.has_root() ? json(q.root) : json(nullptr)});
}

json element_json(FieldElement const & u)
{
    return json::array({u.x, u.y});
}

json condition_json(cf::Condition const & c)
{
    return std::visit(
        [](auto const & v) -> json {
            using T = std::decay_t<decltype(v)>;
            json j;
            if constexpr (std::is_same_v<T, cf::cond::InS>) {
                j["kind"] = "in_s";
            } else if constexpr (std::is_same_v<T, cf::cond::SplitsCompletelyIn>) {
                j["kind"] = "splits_completely_in";
                j["component"] = v.component;
            } else if constexpr (std::is_same_v<T, cf::cond::FrobeniusOrderExactly>) {
                j["kind"] = "frobenius_order";
                j["target"] = prime_json(v.target);
                j["order"] = v.order;
            } else {
                j["kind"] = "kummer_split_exact_level";
                j["alpha"] = element_json(v.alpha);
                j["level"] = v.level;
            }
            return j;
        },
        c);
}

json extension_json(ExtensionCertificate const & c)
{
    json j;
    j["schema_version"] = schema_version;
    if (c.field.is_rational())
        j["field"] = {{"kind", "rational"}};
    else
        j["field"] = {{"kind", "imag_quadratic"}, {"disc", c.field.disc()}};
    j["ell"] = c.ell;
    j["r"] = c.r;
    j["t"] = c.t;

    j["class_data"] = json::array();
    for (std::size_t i = 0; i < c.class_data.rank(); ++i)
        j["class_data"].push_back({{"gen_ideal", prime_json(c.class_data.generators[i])},
                                   {"order", arith::ipow(c.ell, c.class_data.exponents[i])},
                                   {"alpha", element_json(c.class_data.alphas[i])}});
    j["unit_gens"] = json::array();
    for (auto const & u : c.unit_gens)
        j["unit_gens"].push_back(element_json(u));

    j["l0"] = {{"modulus", c.l0.modulus},
               {"character",
                {{"generator", c.l0.generator}, {"order", c.l0.order()}, {"chi_minus_one", c.l0.chi_minus_one}}}};

    j["deficiencies"] = json::array();
    for (auto const & d : c.deficiencies)
        j["deficiencies"].push_back({{"prime", prime_json(d.prime)}, {"deficiency", d.deficiency}});

    j["pieces"] = json::array();
    for (auto const & p : c.pieces) {
        json conds = json::array();
        for (auto const & cond : p.conditions)
            conds.push_back(condition_json(cond));
        j["pieces"].push_back({{"p", p.conductor.p},
                               {"b", p.conductor.has_root() ? json(p.conductor.root) : json(nullptr)},
                               {"norm", p.conductor.norm()},
                               {"conditions", conds}});
    }

    j["bound"] = c.bound;
    j["table"] = json::array();
    for (auto const & e : c.table)
        j["table"].push_back({{"prime", prime_json(e.prime)},
                              {"degree", e.degree},
                              {"ramified_component",
                               e.ramified_component ? json(*e.ramified_component) : json(nullptr)}});
    j["real_place_degree"] = c.real_place_degree ? json(*c.real_place_degree) : json(nullptr);
    j["config"] = {{"enumeration", "norm_asc"},
                   {"cap", c.config.cap},
                   {"greedy_skip", c.config.greedy_skip},
                   {"seed", c.config.seed}};
    return j;
}

// ---- reading

json const & field_of(json const & j, char const * key, std::string const & where)
{
    if (!j.is_object())
        malformed(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        malformed(where, std::string("missing key '") + key + "'");
    return *it;
}

i64 as_int(json const & j, std::string const & where)
{
    if (!j.is_number_integer())
        malformed(where, "expected an integer");
    if (j.is_number_unsigned() && j.get<u64>() > static_cast<u64>(INT64_MAX))
        malformed(where, "integer out of range");
    return j.get<i64>();
}

u64 as_u64(json const & j, std::string const & where)
{
    if (!j.is_number_integer())
        malformed(where, "expected an integer");
    if (!j.is_number_unsigned())
        malformed(where, "expected a non-negative integer");
    return j.get<u64>();
}

json const & as_array(json const & j, std::string const & where)
{
    if (!j.is_array())
        malformed(where, "expected an array");
    return j;
}

i64 get_int(json const & j, char const * key, std::string const & where)
{
    return as_int(field_of(j, key, where), where + "." + key);
}

u64 get_u64(json const & j, char const * key, std::string const & where)
{
    return as_u64(field_of(j, key, where), where + "." + key);
}

PrimeIdeal find_prime(BaseField const & k, u64 p, std::optional<i64> b, std::string const & where)
{
    if (p < 2 || !arith::is_prime(p))
        malformed(where, "not a rational prime: " + std::to_string(p));
    for (auto const & q : quad::factor_rational_prime(k, p))
        if (b ? q.root == *b : !q.has_root())
            return q;
    malformed(where, "no prime of K above " + std::to_string(p) + " with that root");
}

PrimeIdeal parse_prime_pair(BaseField const & k, json const & j, std::string const & where)
{
    if (!j.is_array() || j.size() != 2)
        malformed(where, "expected [p, b or null]");
    u64 p = as_u64(j[0], where + "[0]");
    std::optional<i64> b;
    if (!j[1].is_null())
        b = as_int(j[1], where + "[1]");
    return find_prime(k, p, b, where);
}

FieldElement parse_element(BaseField const & k, json const & j, std::string const & where)
{
    if (!j.is_array() || j.size() != 2)
        malformed(where, "expected [x, y]");
    FieldElement u{as_int(j[0], where + "[0]"), as_int(j[1], where + "[1]")};
    if (!quad::is_valid(k, u))
        malformed(where, "not an integral element of K");
    return u;
}

unsigned log_ell(u64 ell, u64 v, std::string const & where)
{
    unsigned e = 0;
    while (v > 1 && v % ell == 0) {
        v /= ell;
        ++e;
    }
    if (v != 1)
        malformed(where, "expected a power of ell");
    return e;
}

cf::Condition parse_condition(BaseField const & k, json const & j, std::string const & where)
{
    auto const & kind = field_of(j, "kind", where);
    if (!kind.is_string())
        malformed(where + ".kind", "expected a string");
    auto s = kind.get<std::string>();
    if (s == "in_s")
        return cf::cond::InS{};
    if (s == "splits_completely_in")
        return cf::cond::SplitsCompletelyIn{get_u64(j, "component", where)};
    if (s == "frobenius_order")
        return cf::cond::FrobeniusOrderExactly{parse_prime_pair(k, field_of(j, "target", where), where + ".target"),
                                               get_u64(j, "order", where)};
    if (s == "kummer_split_exact_level")
        return cf::cond::KummerSplitExactLevel{parse_element(k, field_of(j, "alpha", where), where + ".alpha"),
                                               static_cast<unsigned>(get_u64(j, "level", where))};
    malformed(where + ".kind", "unknown condition kind '" + s + "'");
}

ExtensionCertificate parse_extension(json const & j, std::string const & where)
{
    ExtensionCertificate c;
    if (get_int(j, "schema_version", where) != schema_version)
        malformed(where + ".schema_version", "unsupported version");

    auto const & field = field_of(j, "field", where);
    auto const & kind = field_of(field, "kind", where + ".field");
    if (kind == "rational") {
        c.field = BaseField::rational();
    } else if (kind == "imag_quadratic") {
        i64 d = get_int(field, "disc", where + ".field");
        if (!quad::is_fundamental_discriminant(d) || d >= 0)
            malformed(where + ".field.disc", "not a negative fundamental discriminant");
        c.field = BaseField::imaginary_quadratic(d);
    } else {
        malformed(where + ".field.kind", "expected \"rational\" or \"imag_quadratic\"");
    }
    auto const & k = c.field;

    c.ell = get_u64(j, "ell", where);
    if (c.ell < 2 || !arith::is_prime(c.ell))
        malformed(where + ".ell", "not a prime");
    u64 r = get_u64(j, "r", where);
    u64 t = get_u64(j, "t", where);
    if (r < 1 || r > 40 || t > 40)
        malformed(where + ".r", "out of range");
    c.r = static_cast<unsigned>(r);
    c.t = static_cast<unsigned>(t);
    // ell^(r+t) must fit comfortably in 64 bits
    u64 cap = 1;
    for (u64 i = 0; i < r + t; ++i) {
        if (cap > (u64{1} << 62) / c.ell)
            malformed(where + ".r", "ell^(r+t) too large");
        cap *= c.ell;
    }

    c.class_data.ell = c.ell;
    auto const & cd = as_array(field_of(j, "class_data", where), where + ".class_data");
    for (std::size_t i = 0; i < cd.size(); ++i) {
        std::string w = where + ".class_data[" + std::to_string(i) + "]";
        c.class_data.generators.push_back(parse_prime_pair(k, field_of(cd[i], "gen_ideal", w), w + ".gen_ideal"));
        c.class_data.exponents.push_back(log_ell(c.ell, get_u64(cd[i], "order", w), w + ".order"));
        c.class_data.alphas.push_back(parse_element(k, field_of(cd[i], "alpha", w), w + ".alpha"));
    }
    c.class_data.t = c.t;

    auto const & units = as_array(field_of(j, "unit_gens", where), where + ".unit_gens");
    for (std::size_t i = 0; i < units.size(); ++i)
        c.unit_gens.push_back(parse_element(k, units[i], where + ".unit_gens[" + std::to_string(i) + "]"));

    auto const & l0 = field_of(j, "l0", where);
    auto const & chi = field_of(l0, "character", where + ".l0");
    c.l0.ell = c.ell;
    c.l0.r = c.r;
    c.l0.modulus = get_u64(l0, "modulus", where + ".l0");
    c.l0.generator = get_u64(chi, "generator", where + ".l0.character");
    c.l0.chi_minus_one = static_cast<int>(get_int(chi, "chi_minus_one", where + ".l0.character"));
    if (get_u64(chi, "order", where + ".l0.character") != c.degree())
        malformed(where + ".l0.character.order", "differs from ell^r");
    if (c.l0.modulus < 2 || c.l0.modulus > (u64{1} << 32) || (c.l0.chi_minus_one != 1 && c.l0.chi_minus_one != -1))
        malformed(where + ".l0", "out of range");

    auto const & defs = as_array(field_of(j, "deficiencies", where), where + ".deficiencies");
    for (std::size_t i = 0; i < defs.size(); ++i) {
        std::string w = where + ".deficiencies[" + std::to_string(i) + "]";
        c.deficiencies.push_back({parse_prime_pair(k, field_of(defs[i], "prime", w), w + ".prime"),
                                  static_cast<unsigned>(get_u64(defs[i], "deficiency", w))});
    }

    auto const & pieces = as_array(field_of(j, "pieces", where), where + ".pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        std::string w = where + ".pieces[" + std::to_string(i) + "]";
        auto const & pj = pieces[i];
        u64 p = get_u64(pj, "p", w);
        auto const & bj = field_of(pj, "b", w);
        std::optional<i64> b;
        if (!bj.is_null())
            b = as_int(bj, w + ".b");
        cons::PieceRecord rec{find_prime(k, p, b, w), {}};
        if (get_u64(pj, "norm", w) != rec.conductor.norm())
            malformed(w + ".norm", "differs from the norm of the prime");
        auto const & conds = as_array(field_of(pj, "conditions", w), w + ".conditions");
        for (std::size_t m = 0; m < conds.size(); ++m)
            rec.conditions.push_back(parse_condition(k, conds[m], w + ".conditions[" + std::to_string(m) + "]"));
        c.pieces.push_back(std::move(rec));
    }

    c.bound = get_u64(j, "bound", where);
    if (c.bound < 2 || c.bound > (u64{1} << 40))
        malformed(where + ".bound", "out of range");

    auto const & table = as_array(field_of(j, "table", where), where + ".table");
    for (std::size_t i = 0; i < table.size(); ++i) {
        std::string w = where + ".table[" + std::to_string(i) + "]";
        cons::TableEntry e;
        e.prime = parse_prime_pair(k, field_of(table[i], "prime", w), w + ".prime");
        e.degree = get_u64(table[i], "degree", w);
        auto const & rc = field_of(table[i], "ramified_component", w);
        if (!rc.is_null())
            e.ramified_component = as_u64(rc, w + ".ramified_component");
        c.table.push_back(e);
    }

    auto const & real = field_of(j, "real_place_degree", where);
    if (!real.is_null())
        c.real_place_degree = as_u64(real, where + ".real_place_degree");

    auto const & config = field_of(j, "config", where);
    auto const & en = field_of(config, "enumeration", where + ".config");
    if (en != "norm_asc")
        malformed(where + ".config.enumeration", "only \"norm_asc\" is supported");
    c.config.cap = get_u64(config, "cap", where + ".config");
    auto const & gs = field_of(config, "greedy_skip", where + ".config");
    if (!gs.is_boolean())
        malformed(where + ".config.greedy_skip", "expected a boolean");
    c.config.greedy_skip = gs.get<bool>();
    c.config.seed = get_u64(config, "seed", where + ".config");
    return c;
}

} // namespace

std::string serialize(Certificate const & c)
{
    json j;
    if (auto const * e = std::get_if<ExtensionCertificate>(&c)) {
        j = extension_json(*e);
    } else {
        auto const & comp = std::get<CompositeCertificate>(c);
        json inner;
        inner["n"] = comp.n;
        inner["components"] = json::array();
        for (auto const & e : comp.components)
            inner["components"].push_back(extension_json(e));
        inner["table"] = json::array();
        for (auto const & e : comp.table)
            inner["table"].push_back({{"prime", prime_json(e.prime)}, {"degree", e.degree}});
        j["schema_version"] = schema_version;
        j["composite"] = inner;
    }
    return j.dump(2) + "\n";
}

Certificate parse(std::string const & text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (json::parse_error const & e) {
        throw MalformedCertificate(std::string("not valid JSON: ") + e.what());
    }
    try {
        if (!j.is_object())
            malformed("$", "expected an object");
        if (!j.contains("composite"))
            return parse_extension(j, "$");

        if (get_int(j, "schema_version", "$") != schema_version)
            malformed("$.schema_version", "unsupported version");
        auto const & inner = field_of(j, "composite", "$");
        CompositeCertificate comp;
        comp.n = get_u64(inner, "n", "$.composite");
        auto const & comps = as_array(field_of(inner, "components", "$.composite"), "$.composite.components");
        if (comps.empty())
            malformed("$.composite.components", "empty");
        for (std::size_t i = 0; i < comps.size(); ++i)
            comp.components.push_back(parse_extension(comps[i], "$.composite.components[" + std::to_string(i) + "]"));
        auto const & k = comp.components.front().field;
        for (auto const & c : comp.components)
            if (!(c.field == k))
                malformed("$.composite.components", "components over different fields");
        auto const & table = as_array(field_of(inner, "table", "$.composite"), "$.composite.table");
        for (std::size_t i = 0; i < table.size(); ++i) {
            std::string w = "$.composite.table[" + std::to_string(i) + "]";
            comp.table.push_back(
                {parse_prime_pair(k, field_of(table[i], "prime", w), w + ".prime"), get_u64(table[i], "degree", w)});
        }
        return comp;
    } catch (json::exception const & e) {
        throw MalformedCertificate(e.what());
    }
}

} // namespace cdeg::cert
