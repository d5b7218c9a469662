#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace obda {

/// Exact arbitrary-precision rational used for ontology-layer data values.
using Rational = boost::multiprecision::cpp_rational;

/// Parses "12", "-0.9", "2.5e-3" or "1/3". Returns nullopt on anything else.
std::optional<Rational> parse_rational(std::string_view text);

/// Decimal form when the value has a terminating expansion, "p/q" otherwise.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

}  // namespace obda
