#include "cli/range.hpp"

#include <charconv>
#include <stdexcept>
#include <string>

namespace permorder::cli {

namespace {

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a natural number: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

NRange parse_range(std::string_view text) {
  const auto dots = text.find("..");
  NRange r;
  if (dots == std::string_view::npos) {
    r.first = r.last = parse_u64(text);
  } else {
    r.first = parse_u64(text.substr(0, dots));
    r.last = parse_u64(text.substr(dots + 2));
  }
  if (r.first > r.last) throw std::invalid_argument("empty range '" + std::string(text) + "'");
  return r;
}

Rational parse_exact_rational(std::string_view text) {
  const auto point = text.find('.');
  if (point == std::string_view::npos) return parse_rational(text);
  const std::string_view whole = text.substr(0, point);
  const std::string_view frac = text.substr(point + 1);
  if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos ||
      whole.find_first_not_of("0123456789") != std::string_view::npos) {
    throw std::invalid_argument("not a decimal: '" + std::string(text) + "'");
  }
  Natural num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
  Natural den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational out(num, den);
  out.canonicalize();
  return out;
}

}  // namespace permorder::cli
