#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace permorder {

/// Arbitrary-precision natural number. Every count and order in the library
/// is carried in this type; nothing is narrowed to a fixed width.
using Natural = mpz_class;

/// Exact rational, always kept in canonical (lowest-terms) form.
using Rational = mpq_class;

/// Argument outside the mathematical domain of an operation (m = 0, k not in K_n, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A configured resource cap (n or support size) would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Natural to_natural(std::uint64_t value);

/// Canonical decimal rendering: no sign, no leading zeros.
std::string to_string(const Natural& value);

/// Always "p/q", including integers ("3/1") so machine output has one shape.
std::string to_string(const Rational& value);

/// Parses a canonical decimal natural; throws std::invalid_argument otherwise.
Natural parse_natural(std::string_view text);

/// Parses "p/q" (or a bare natural) into a canonical Rational.
Rational parse_rational(std::string_view text);

/// True if the value fits in std::uint64_t; fills `out` when it does.
bool fits_u64(const Natural& value, std::uint64_t& out);

Natural factorial(std::uint64_t n);

/// (n-1)(n-2)...(n-j+1), the number of ways to close a j-cycle through a
/// fixed point among n. Equals 1 for j = 1.
Natural cycle_closures(std::uint64_t n, std::uint64_t j);

double to_double(const Rational& value);

}  // namespace permorder
