#include "permorder/numtheory.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace permorder::numtheory {

namespace {

// Dense lcm table is size^2 entries of 4 bytes.
constexpr std::size_t kMaxLatticeSize = 4096;

Natural pow_natural(const Natural& base, unsigned exponent) {
  Natural out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

}  // namespace

FactoredInt::FactoredInt() : value_(1) {}

FactoredInt FactoredInt::from_factors(std::vector<PrimePower> factors) {
  FactoredInt out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& [prime, exponent] = factors[i];
    std::uint64_t p = 0;
    if (!fits_u64(prime, p) || !is_prime(p)) {
      throw DomainError("factor " + to_string(prime) + " is not a prime");
    }
    if (exponent == 0) throw DomainError("zero exponent for prime " + to_string(prime));
    if (i > 0 && !(factors[i - 1].prime < prime)) {
      throw DomainError("primes must be strictly increasing");
    }
    out.value_ *= pow_natural(prime, exponent);
  }
  out.factors_ = std::move(factors);
  return out;
}

FactoredInt factorize(const Natural& m) {
  if (sgn(m) <= 0) throw DomainError("factorize: m must be >= 1, got " + m.get_str());
  std::vector<PrimePower> factors;
  Natural rest = m;
  auto strip = [&](unsigned long d) {
    unsigned e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), d) != 0) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), d);
      ++e;
    }
    if (e > 0) factors.push_back({Natural(d), e});
  };
  strip(2);
  strip(3);
  // 6k +- 1 wheel
  for (unsigned long d = 5; Natural(d) * d <= rest; d += 6) {
    strip(d);
    strip(d + 2);
  }
  if (rest > 1) factors.push_back({rest, 1});
  return FactoredInt::from_factors(std::move(factors));
}

FactoredInt factorize(std::uint64_t m) { return factorize(to_natural(m)); }

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  if (p % 2 == 0) return p == 2;
  if (p % 3 == 0) return p == 3;
  for (std::uint64_t d = 5; d <= p / d; d += 6) {
    if (p % d == 0 || p % (d + 2) == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t p = 2; p <= limit; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
  }
  return primes;
}

DivisorLattice::DivisorLattice(FactoredInt m) : m_(std::move(m)) {
  const auto factors = m_.factors();
  const std::size_t width = factors.size();
  std::size_t count = 1;
  for (const auto& f : factors) {
    count *= f.exponent + 1;
    if (count > kMaxLatticeSize) {
      throw BudgetExceeded("divisor lattice of " + to_string(m_.value()) + " exceeds " +
                           std::to_string(kMaxLatticeSize) + " divisors");
    }
  }

  // Mixed-radix enumeration: radix r <-> exponent vector.
  std::vector<unsigned> exps(count * width);
  std::vector<Natural> values(count);
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t rest = r;
    Natural v = 1;
    for (std::size_t i = 0; i < width; ++i) {
      const unsigned e = static_cast<unsigned>(rest % (factors[i].exponent + 1));
      rest /= factors[i].exponent + 1;
      exps[r * width + i] = e;
      v *= pow_natural(factors[i].prime, e);
    }
    values[r] = std::move(v);
  }

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<std::uint32_t> rank(count);
  divisors_.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    rank[order[i]] = static_cast<std::uint32_t>(i);
    divisors_.push_back(values[order[i]]);
  }

  lcm_.assign(count * count, 0);
  for (std::size_t a = 0; a < count; ++a) {
    for (std::size_t b = a; b < count; ++b) {
      std::size_t radix = 0;
      std::size_t scale = 1;
      for (std::size_t i = 0; i < width; ++i) {
        radix += scale * std::max(exps[a * width + i], exps[b * width + i]);
        scale *= factors[i].exponent + 1;
      }
      const std::uint32_t idx = rank[radix];
      lcm_[rank[a] * count + rank[b]] = idx;
      lcm_[rank[b] * count + rank[a]] = idx;
    }
  }
}

std::optional<std::size_t> DivisorLattice::index_of(const Natural& d) const {
  auto it = std::lower_bound(divisors_.begin(), divisors_.end(), d);
  if (it == divisors_.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - divisors_.begin());
}

std::vector<std::size_t> DivisorLattice::indices_up_to(std::uint64_t bound) const {
  std::vector<std::size_t> out;
  const Natural limit = to_natural(bound);
  for (std::size_t i = 0; i < divisors_.size() && divisors_[i] <= limit; ++i) out.push_back(i);
  return out;
}

DivisorLattice divisors_of(const FactoredInt& f) { return DivisorLattice(f); }

std::uint64_t tau(const FactoredInt& f) {
  std::uint64_t out = 1;
  for (const auto& pp : f.factors()) out *= pp.exponent + 1;
  return out;
}

Natural sigma(const FactoredInt& f) {
  Natural out = 1;
  for (const auto& pp : f.factors()) {
    out *= (pow_natural(pp.prime, pp.exponent + 1) - 1) / (pp.prime - 1);
  }
  return out;
}

unsigned omega(const FactoredInt& f) { return static_cast<unsigned>(f.factors().size()); }

Natural lcm_range(std::uint64_t k) {
  Natural out = 1;
  for (std::uint64_t i = 2; i <= k; ++i) {
    mpz_lcm(out.get_mpz_t(), out.get_mpz_t(), to_natural(i).get_mpz_t());
  }
  return out;
}

bool KnRecord::contains(std::uint64_t k) const {
  return std::binary_search(members.begin(), members.end(), k);
}

KnRecord compute_kn(std::uint64_t n) {
  if (n == 0) throw DomainError("compute_kn: n must be >= 1");
  KnRecord out{n, {}, 0};
  Natural l = 1;
  for (std::uint64_t k = 0; k < n; ++k) {
    if (k >= 2) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), to_natural(k).get_mpz_t());
    const Natural gap = to_natural(n - k);
    // lcm(1..k) only grows while n - k shrinks.
    if (l > gap) break;
    if (mpz_divisible_p(gap.get_mpz_t(), l.get_mpz_t()) != 0) out.members.push_back(k);
  }
  out.max_k = out.members.back();
  return out;
}

Natural landau_g(std::uint64_t n) {
  // best[s]: largest lcm of prime powers over distinct primes with total cost <= s.
  std::vector<Natural> best(n + 1, Natural(1));
  for (std::uint64_t p : primes_up_to(n)) {
    for (std::uint64_t s = n; s >= p; --s) {
      for (std::uint64_t q = p; q <= s; q *= p) {
        Natural candidate = best[s - q] * to_natural(q);
        if (candidate > best[s]) best[s] = std::move(candidate);
        if (q > s / p) break;
      }
    }
  }
  return best[n];
}

}  // namespace permorder::numtheory
