#include "permorder/types.hpp"

#include <algorithm>
#include <cctype>

namespace permorder {

Natural to_natural(std::uint64_t value) {
  Natural out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(value), 0, 0, &value);
  return out;
}

std::string to_string(const Natural& value) { return value.get_str(10); }

std::string to_string(const Rational& value) {
  return value.get_num().get_str(10) + "/" + value.get_den().get_str(10);
}

namespace {

bool is_canonical_decimal(std::string_view text) {
  if (text.empty()) return false;
  if (!std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
    return false;
  }
  return text.size() == 1 || text.front() != '0';
}

}  // namespace

Natural parse_natural(std::string_view text) {
  if (!is_canonical_decimal(text)) {
    throw std::invalid_argument("not a canonical decimal natural: '" + std::string(text) + "'");
  }
  return Natural(std::string(text), 10);
}

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_natural(text));
  Natural num = parse_natural(text.substr(0, slash));
  Natural den = parse_natural(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  Rational out(num, den);
  out.canonicalize();
  return out;
}

bool fits_u64(const Natural& value, std::uint64_t& out) {
  if (sgn(value) < 0 || mpz_sizeinbase(value.get_mpz_t(), 2) > 64) return false;
  out = 0;
  std::size_t count = 0;
  mpz_export(&out, &count, 1, sizeof(out), 0, 0, value.get_mpz_t());
  return true;
}

Natural factorial(std::uint64_t n) {
  Natural out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

Natural cycle_closures(std::uint64_t n, std::uint64_t j) {
  Natural out = 1;
  for (std::uint64_t t = 1; t < j; ++t) out *= to_natural(n - t);
  return out;
}

double to_double(const Rational& value) { return value.get_d(); }

}  // namespace permorder
