#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "cdeg/verifier.hpp"

using namespace cdeg;

namespace {

enum Exit : int { ok = 0, usage = 1, failed = 2, exhausted = 3, internal = 4 };

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

quad::BaseField parse_field(std::string const & spec)
{
    if (spec == "q" || spec == "Q")
        return quad::BaseField::rational();
    if (spec.rfind("disc=", 0) == 0) {
        i64 d = 0;
        try {
            std::size_t used = 0;
            d = std::stoll(spec.substr(5), &used);
            if (used != spec.size() - 5)
                throw std::invalid_argument("trailing characters");
        } catch (std::exception const &) {
            throw UsageError("field: cannot parse discriminant in '" + spec + "'");
        }
        if (d >= 0 || !quad::is_fundamental_discriminant(d))
            throw UsageError("field: " + std::to_string(d) +
                             " is not a negative fundamental discriminant (D = 1 mod 4 squarefree, or D = 4m with "
                             "m = 2, 3 mod 4 squarefree)");
        return quad::BaseField::imaginary_quadratic(d);
    }
    throw UsageError("field: expected 'q' or 'disc=<D>', got '" + spec + "'");
}

// "a" or "a/b"; returns an integer in the same square class
i64 parse_rational(std::string const & s)
{
    try {
        std::size_t used = 0;
        auto slash = s.find('/');
        i64 num = std::stoll(s.substr(0, slash), &used);
        if (used != (slash == std::string::npos ? s.size() : slash))
            throw std::invalid_argument("trailing characters");
        i64 den = 1;
        if (slash != std::string::npos) {
            den = std::stoll(s.substr(slash + 1), &used);
            if (used != s.size() - slash - 1)
                throw std::invalid_argument("trailing characters");
        }
        if (num == 0 || den == 0)
            throw UsageError("quaternion parameters must be nonzero");
        return num * den;
    } catch (UsageError const &) {
        throw;
    } catch (std::exception const &) {
        throw UsageError("cannot parse rational number '" + s + "'");
    }
}

std::string read_file(std::string const & path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string place_name(u64 v)
{
    return v == verify::real_place ? "inf" : std::to_string(v);
}

std::string prime_name(quad::PrimeIdeal const & q)
{
    std::ostringstream o;
    o << q;
    return o.str();
}

void print_extension_summary(std::ostream & o, cons::ExtensionCertificate const & c)
{
    o << "ell^r = " << c.ell << "^" << c.r << ", t = " << c.t << ", L0 modulus " << c.l0.modulus << ", "
      << c.pieces.size() << " ray pieces\n";
    for (std::size_t i = 0; i < c.pieces.size(); ++i)
        o << "  L" << i + 1 << ": conductor " << prime_name(c.pieces[i].conductor) << ", norm "
          << c.pieces[i].conductor.norm() << "\n";
    o << std::left << std::setw(16) << "  prime" << std::right << std::setw(8) << "degree" << std::setw(10)
      << "ramified\n";
    for (auto const & e : c.table)
        o << "  " << std::left << std::setw(14) << prime_name(e.prime) << std::right << std::setw(8) << e.degree
          << std::setw(9) << (e.ramified_component ? "L" + std::to_string(*e.ramified_component) : "-") << "\n";
    if (c.real_place_degree)
        o << "  " << std::left << std::setw(14) << "real" << std::right << std::setw(8) << *c.real_place_degree
          << "\n";
}

int run(int argc, char ** argv)
{
    CLI::App app{"Abelian extensions with prescribed local degrees: construction and verification"};
    app.require_subcommand(1);

    auto * construct = app.add_subcommand("construct", "build a certificate");
    std::string field_spec = "q", out_path;
    u64 n = 0, bound = 0;
    cons::ConstructConfig config;
    construct->add_option("--field", field_spec, "q or disc=<D>")->capture_default_str();
    construct->add_option("--n", n, "degree (>= 2)")->required();
    construct->add_option("--bound", bound, "norm bound (>= 2)")->required();
    construct->add_option("--cap", config.cap, "rational primes examined per search")->capture_default_str();
    construct->add_option("--greedy-skip", config.greedy_skip, "skip primes already at full degree")
        ->capture_default_str();
    construct->add_option("--seed", config.seed, "recorded in the certificate")->capture_default_str();
    construct->add_option("--out", out_path, "certificate file")->required();

    auto * verify_cmd = app.add_subcommand("verify", "recompute every local degree of a certificate");
    std::string cert_path;
    std::optional<u64> verify_bound;
    bool quiet = false;
    verify_cmd->add_option("file", cert_path, "certificate file")->required();
    verify_cmd->add_option("--bound", verify_bound, "check primes up to this norm");
    verify_cmd->add_flag("--quiet", quiet, "print only the verdict");

    auto * cg = app.add_subcommand("class-group", "reduced forms of a discriminant");
    i64 disc = 0;
    cg->add_option("--disc", disc, "negative fundamental discriminant")->required();

    auto * hilbert = app.add_subcommand("hilbert", "ramified places of the quaternion algebra (a, b) over Q");
    std::string a_str, b_str;
    hilbert->add_option("--a", a_str)->required();
    hilbert->add_option("--b", b_str)->required();

    auto * brauer = app.add_subcommand("brauer-split", "does a certified n = 2 extension split (a, b)?");
    brauer->add_option("file", cert_path, "certificate file")->required();
    brauer->add_option("--a", a_str)->required();
    brauer->add_option("--b", b_str)->required();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const & e) {
        int code = app.exit(e);
        return code == 0 ? Exit::ok : Exit::usage;
    }

    if (*construct) {
        if (n < 2)
            throw UsageError("--n must be >= 2");
        if (bound < 2)
            throw UsageError("--bound must be >= 2");
        auto k = parse_field(field_spec);
        auto fac = arith::factor(n);
        cert::Certificate c;
        if (fac.size() == 1) {
            auto e = cons::construct(k, fac[0].prime, fac[0].exponent, bound, config);
            print_extension_summary(std::cout, e);
            c = std::move(e);
        } else {
            auto comp = cons::compose_for_n(k, n, bound, config);
            for (auto const & e : comp.components)
                print_extension_summary(std::cout, e);
            std::cout << "combined degree " << comp.n << " at all " << comp.table.size() << " primes of norm <= "
                      << bound << "\n";
            c = std::move(comp);
        }
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw UsageError("cannot write " + out_path);
        out << cert::serialize(c);
        if (!out.flush())
            throw UsageError("cannot write " + out_path);
        std::cout << "wrote " << out_path << "\n";
        return Exit::ok;
    }

    if (*verify_cmd) {
        auto text = read_file(cert_path);
        auto c = cert::parse(text);
        auto report = verify::verify(c, verify_bound);
        if (quiet) {
            std::cout << (report.verdict ? "PASS" : "FAIL") << "\n";
            for (auto const & f : report.failures())
                std::cout << "failure: " << f << "\n";
        } else if (report.components.empty()) {
            verify::print_report(std::cout, report);
        } else {
            for (std::size_t i = 0; i < report.components.size(); ++i) {
                std::cout << "-- component " << i << "\n";
                verify::print_report(std::cout, report.components[i]);
            }
            std::cout << "-- combined\n";
            verify::print_report(std::cout, report);
        }
        return report.verdict ? Exit::ok : Exit::failed;
    }

    if (*cg) {
        auto k = parse_field("disc=" + std::to_string(disc));
        quad::ClassGroup cl(k);
        for (auto const & f : cl.forms())
            std::cout << f << "  order " << cl.order(f) << "\n";
        std::cout << "h = " << cl.class_number() << "\n";
        return Exit::ok;
    }

    if (*hilbert) {
        i64 a = parse_rational(a_str), b = parse_rational(b_str);
        auto places = verify::ramified_places(a, b);
        std::cout << "ramified at:";
        for (u64 v : places)
            std::cout << " " << place_name(v);
        std::cout << (places.empty() ? " none (split)\n" : "\n");
        return Exit::ok;
    }

    if (*brauer) {
        i64 a = parse_rational(a_str), b = parse_rational(b_str);
        auto c = cert::parse(read_file(cert_path));
        auto const * e = std::get_if<cons::ExtensionCertificate>(&c);
        if (!e)
            throw UsageError("brauer-split needs a prime-power certificate with n = 2^r");
        verify::BrauerSplitResult res;
        try {
            res = verify::brauer_split_check(*e, {a, b});
        } catch (PreconditionError const & err) {
            throw UsageError(err.what());
        } catch (verify::RamifiedPlaceOutOfRange const & err) {
            throw UsageError(err.what());
        }
        std::cout << "ramified at:";
        for (u64 v : res.ramified)
            std::cout << " " << place_name(v);
        std::cout << (res.ramified.empty() ? " none" : "") << "\n";
        for (u64 v : res.uncovered)
            std::cout << "odd local degree at " << place_name(v) << "\n";
        std::cout << (res.splits ? "splits" : "does not split") << "\n";
        return res.splits ? Exit::ok : Exit::failed;
    }
    return Exit::usage;
}

} // namespace

int main(int argc, char ** argv)
{
    try {
        return run(argc, argv);
    } catch (UsageError const & e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::usage;
    } catch (MalformedCertificate const & e) {
        std::cerr << "malformed certificate: " << e.what() << "\n";
        return Exit::failed;
    } catch (SearchExhausted const & e) {
        std::cerr << "search exhausted: " << e.what() << "\n";
        return Exit::exhausted;
    } catch (InternalInconsistency const & e) {
        std::cerr << "internal inconsistency: " << e.what() << "\n";
        return Exit::internal;
    } catch (PreconditionError const & e) {
        std::cerr << "error: " << e.what() << "\n";
        return Exit::usage;
    }
}
