#pragma once

#include <cstdint>
#include <string_view>

#include "permorder/types.hpp"

namespace permorder::cli {

/// Inclusive range "a..b", or a single value "a".
struct NRange {
  std::uint64_t first = 0;
  std::uint64_t last = 0;

  std::uint64_t size() const { return last - first + 1; }
};

/// Throws std::invalid_argument on malformed or empty ranges.
NRange parse_range(std::string_view text);

/// Accepts "p/q", an integer, or a plain decimal like "0.3" (taken exactly as 3/10).
Rational parse_exact_rational(std::string_view text);

}  // namespace permorder::cli
