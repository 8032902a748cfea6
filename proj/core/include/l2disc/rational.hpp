#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace l2disc {

/// Arbitrary-precision rational number.
using Rational = mpq_class;

/// Every finite double is a dyadic rational; this returns it exactly.
Rational exact_from_double(double v);

/// 2^e as an exact rational (e may be negative).
Rational pow2(long e);

/// "p/q" with q > 0 and gcd(p, q) = 1, even when q = 1.
std::string to_string(const Rational& r);

/// Parses "p/q" or an integer "p". Returns nullopt on malformed text or q = 0.
std::optional<Rational> parse_rational(std::string_view text);

}  // namespace l2disc
