#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "permorder/types.hpp"

namespace permorder::numtheory {

struct PrimePower {
  Natural prime;
  unsigned exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A natural number >= 1 together with its canonical prime factorization.
class FactoredInt {
 public:
  /// The number 1 (empty factorization).
  FactoredInt();

  /// Builds from an explicit factorization. Primes must be strictly
  /// increasing, exponents >= 1, and each prime must pass trial division.
  static FactoredInt from_factors(std::vector<PrimePower> factors);

  const Natural& value() const { return value_; }
  std::span<const PrimePower> factors() const { return factors_; }

  friend bool operator==(const FactoredInt& a, const FactoredInt& b) { return a.value_ == b.value_; }

 private:
  Natural value_;
  std::vector<PrimePower> factors_;
};

/// Deterministic trial division. Throws DomainError for m = 0.
FactoredInt factorize(const Natural& m);
FactoredInt factorize(std::uint64_t m);

bool is_prime(std::uint64_t p);
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

/// Sorted divisors of m with a dense lcm composition table.
///
/// Divisor i has an exponent vector over the primes of m; the table entry
/// (a, b) is the index of lcm(divisors[a], divisors[b]). Index 0 is always
/// the divisor 1 and size()-1 is m itself.
class DivisorLattice {
 public:
  explicit DivisorLattice(FactoredInt m);

  const FactoredInt& modulus() const { return m_; }
  std::size_t size() const { return divisors_.size(); }
  std::span<const Natural> divisors() const { return divisors_; }
  const Natural& divisor(std::size_t index) const { return divisors_[index]; }

  std::size_t lcm_index(std::size_t a, std::size_t b) const {
    return lcm_[a * divisors_.size() + b];
  }

  std::optional<std::size_t> index_of(const Natural& d) const;
  std::size_t top_index() const { return divisors_.size() - 1; }

  /// Indices of divisors that are <= bound, in increasing order of value.
  std::vector<std::size_t> indices_up_to(std::uint64_t bound) const;

 private:
  FactoredInt m_;
  std::vector<Natural> divisors_;
  std::vector<std::uint32_t> lcm_;
};

DivisorLattice divisors_of(const FactoredInt& f);

std::uint64_t tau(const FactoredInt& f);
Natural sigma(const FactoredInt& f);
unsigned omega(const FactoredInt& f);

/// lcm(1, ..., k); the empty range (k = 0) gives 1.
Natural lcm_range(std::uint64_t k);

/// K_n = { k in [0, n) : lcm(1..k) divides n - k }.
struct KnRecord {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> members;
  std::uint64_t max_k = 0;

  bool contains(std::uint64_t k) const;
};

KnRecord compute_kn(std::uint64_t n);

/// Landau's function: the largest order of a permutation of n points.
Natural landau_g(std::uint64_t n);

}  // namespace permorder::numtheory
