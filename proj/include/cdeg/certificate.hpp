#ifndef CDEG_CERTIFICATE_HPP
#define CDEG_CERTIFICATE_HPP

#include <stdexcept>
#include <string>
#include <variant>

#include "cdeg/constructor.hpp"

namespace cdeg {

/* The certificate text is not valid JSON, or a field has the wrong type,
 * range or shape. */
class MalformedCertificate : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

namespace cert {

using Certificate = std::variant<cons::ExtensionCertificate, cons::CompositeCertificate>;

inline constexpr int schema_version = 1;

/* Pretty-printed JSON, keys in schema order, trailing newline. */
std::string serialize(Certificate const & c);

/* Structural parse only: types, ranges, prime ideals that exist in K.
 * Throws MalformedCertificate. Nothing is checked mathematically. */
Certificate parse(std::string const & text);

} // namespace cert
} // namespace cdeg

#endif /* CDEG_CERTIFICATE_HPP */
