#include "permorder/exactdist.hpp"

#include <algorithm>
#include <mutex>
#include <string>
#include <utility>

#include "permorder/parallel.hpp"

namespace permorder::exactdist {

using numtheory::DivisorLattice;
using numtheory::FactoredInt;
using numtheory::PrimePower;

namespace {

// Divisors of f not exceeding bound, ascending. Avoids materializing the
// whole lattice when m has many large divisors.
std::vector<std::uint64_t> small_divisors(const FactoredInt& f, std::uint64_t bound) {
  std::vector<std::uint64_t> out{1};
  if (bound == 0) return {};
  for (const auto& [prime, exponent] : f.factors()) {
    std::uint64_t p = 0;
    if (!fits_u64(prime, p) || p > bound) continue;
    const std::size_t existing = out.size();
    for (std::size_t i = 0; i < existing; ++i) {
      std::uint64_t v = out[i];
      for (unsigned e = 1; e <= exponent && v <= bound / p; ++e) {
        v *= p;
        out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t prime_power_cost(const FactoredInt& m) {
  std::uint64_t cost = 0;
  for (const auto& [prime, exponent] : m.factors()) {
    Natural q;
    mpz_pow_ui(q.get_mpz_t(), prime.get_mpz_t(), exponent);
    std::uint64_t v = 0;
    if (!fits_u64(q, v)) return UINT64_MAX;
    cost += v;
    if (cost < v) return UINT64_MAX;
  }
  return cost;
}

void check_n_budget(std::uint64_t n, const Budget& budget) {
  if (n > budget.max_n) {
    throw BudgetExceeded("n = " + std::to_string(n) + " exceeds budget max_n = " +
                         std::to_string(budget.max_n));
  }
}

}  // namespace

Natural count_lengths_in(std::uint64_t n, const std::vector<std::uint64_t>& allowed) {
  std::vector<Natural> ways(n + 1);
  ways[0] = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    Natural closures = 1;
    std::uint64_t t = 1;
    for (std::uint64_t j : allowed) {
      if (j > i) break;
      for (; t < j; ++t) closures *= to_natural(i - t);
      ways[i] += closures * ways[i - j];
    }
  }
  return ways[n];
}

Natural count_lengths_divide(std::uint64_t n, const FactoredInt& d) {
  return count_lengths_in(n, small_divisors(d, n));
}

LatticeCountVector::LatticeCountVector(std::uint64_t n, std::shared_ptr<const DivisorLattice> lattice,
                                       std::map<std::size_t, Natural> counts)
    : n_(n), lattice_(std::move(lattice)), counts_(std::move(counts)) {}

Natural LatticeCountVector::count_at(std::size_t index) const {
  auto it = counts_.find(index);
  return it == counts_.end() ? Natural(0) : it->second;
}

Natural LatticeCountVector::count_of(const Natural& order) const {
  auto idx = lattice_->index_of(order);
  return idx ? count_at(*idx) : Natural(0);
}

Natural LatticeCountVector::total() const {
  Natural sum = 0;
  for (const auto& [idx, c] : counts_) sum += c;
  return sum;
}

LatticeCountVector order_counts_on_lattice(std::uint64_t n, const FactoredInt& m) {
  return order_counts_on_lattice(n, std::make_shared<const DivisorLattice>(m));
}

LatticeCountVector order_counts_on_lattice(std::uint64_t n,
                                           std::shared_ptr<const DivisorLattice> lattice) {
  const DivisorLattice& lat = *lattice;
  const std::size_t size = lat.size();

  std::vector<std::pair<std::size_t, std::uint64_t>> steps;  // (index, cycle length)
  for (std::size_t idx : lat.indices_up_to(n)) {
    std::uint64_t j = 0;
    fits_u64(lat.divisor(idx), j);
    steps.emplace_back(idx, j);
  }

  // levels[i]: sparse (divisor index, count) of permutations of [i] with
  // every cycle length dividing m, keyed by exact order.
  std::vector<std::vector<std::pair<std::size_t, Natural>>> levels(n + 1);
  levels[0].emplace_back(0, Natural(1));
  std::vector<Natural> acc(size);
  std::vector<bool> touched(size, false);
  std::vector<std::size_t> touched_list;

  for (std::uint64_t i = 1; i <= n; ++i) {
    Natural closures = 1;
    std::uint64_t t = 1;
    Natural term;
    for (const auto& [jidx, j] : steps) {
      if (j > i) break;
      for (; t < j; ++t) closures *= to_natural(i - t);
      for (const auto& [d, c] : levels[i - j]) {
        const std::size_t e = lat.lcm_index(d, jidx);
        term = closures * c;
        acc[e] += term;
        if (!touched[e]) {
          touched[e] = true;
          touched_list.push_back(e);
        }
      }
    }
    std::sort(touched_list.begin(), touched_list.end());
    auto& level = levels[i];
    level.reserve(touched_list.size());
    for (std::size_t e : touched_list) {
      level.emplace_back(e, std::move(acc[e]));
      acc[e] = 0;
      touched[e] = false;
    }
    touched_list.clear();
    // Levels below i - max step are never read again.
    if (!steps.empty() && i >= steps.back().second) {
      auto& stale = levels[i - steps.back().second];
      stale.clear();
      stale.shrink_to_fit();
    }
  }

  std::map<std::size_t, Natural> counts;
  for (auto& [e, c] : levels[n]) counts.emplace(e, std::move(c));
  return LatticeCountVector(n, std::move(lattice), std::move(counts));
}

Natural count_order_exactly_mobius(std::uint64_t n, const FactoredInt& m) {
  const auto factors = m.factors();
  const std::size_t width = factors.size();
  Natural total = 0;
  // Only squarefree m/d contribute: drop one power of each prime in the subset.
  for (std::uint64_t subset = 0; subset < (std::uint64_t{1} << width); ++subset) {
    std::vector<PrimePower> reduced;
    int sign = 1;
    for (std::size_t i = 0; i < width; ++i) {
      unsigned e = factors[i].exponent;
      if ((subset >> i) & 1U) {
        --e;
        sign = -sign;
      }
      if (e > 0) reduced.push_back({factors[i].prime, e});
    }
    const Natural nd = count_lengths_divide(n, FactoredInt::from_factors(std::move(reduced)));
    if (sign > 0) {
      total += nd;
    } else {
      total -= nd;
    }
  }
  return total;
}

bool is_achievable(const FactoredInt& m, std::uint64_t n) { return prime_power_cost(m) <= n; }

Rational p_exact(std::uint64_t n, const Natural& m) {
  if (n == 0) throw DomainError("p_exact: n must be >= 1");
  const FactoredInt f = numtheory::factorize(m);
  if (!is_achievable(f, n)) return Rational(0);
  Rational out(order_counts_on_lattice(n, f).count_of(m), factorial(n));
  out.canonicalize();
  return out;
}

Natural support_size(std::uint64_t n) {
  std::vector<Natural> exact(n + 1);
  exact[0] = 1;
  for (std::uint64_t p : numtheory::primes_up_to(n)) {
    for (std::uint64_t s = n; s >= p; --s) {
      for (std::uint64_t q = p; q <= s; q *= p) {
        exact[s] += exact[s - q];
        if (q > s / p) break;
      }
    }
  }
  Natural total = 0;
  for (const auto& c : exact) total += c;
  return total;
}

std::vector<FactoredInt> support_factored(std::uint64_t n, const Budget& budget) {
  if (n == 0) throw DomainError("support: n must be >= 1");
  check_n_budget(n, budget);
  const Natural size = support_size(n);
  if (size > to_natural(budget.max_support)) {
    throw BudgetExceeded("support of n = " + std::to_string(n) + " has " + to_string(size) +
                         " elements, exceeding budget max_support = " +
                         std::to_string(budget.max_support));
  }

  const auto primes = numtheory::primes_up_to(n);
  std::vector<FactoredInt> out;
  std::vector<PrimePower> chosen;
  auto visit = [&](auto&& self, std::size_t pi, std::uint64_t remaining) -> void {
    if (pi == primes.size() || primes[pi] > remaining) {
      out.push_back(FactoredInt::from_factors(chosen));
      return;
    }
    self(self, pi + 1, remaining);
    const std::uint64_t p = primes[pi];
    unsigned e = 1;
    for (std::uint64_t q = p; q <= remaining; q *= p, ++e) {
      chosen.push_back({Natural(static_cast<unsigned long>(p)), e});
      self(self, pi + 1, remaining - q);
      chosen.pop_back();
      if (q > remaining / p) break;
    }
  };
  visit(visit, 0, n);
  std::sort(out.begin(), out.end(),
            [](const FactoredInt& a, const FactoredInt& b) { return a.value() < b.value(); });
  return out;
}

std::vector<Natural> support(std::uint64_t n, const Budget& budget) {
  std::vector<Natural> out;
  for (const auto& f : support_factored(n, budget)) out.push_back(f.value());
  return out;
}

Natural OrderPmf::total() const {
  Natural sum = 0;
  for (const auto& [m, c] : entries) sum += c;
  return sum;
}

Natural OrderPmf::count(const Natural& m) const {
  auto it = entries.find(m);
  return it == entries.end() ? Natural(0) : it->second;
}

Rational OrderPmf::probability(const Natural& m) const {
  Rational out(count(m), factorial(n));
  out.canonicalize();
  return out;
}

OrderPmf full_pmf(std::uint64_t n, const Budget& budget) {
  const auto candidates = support_factored(n, budget);
  const auto primes = numtheory::primes_up_to(n);

  // The support is closed under divisors, so one lattice recursion per
  // divisibility-maximal element covers every entry.
  OrderPmf pmf{n, {}};
  for (const auto& m : candidates) {
    const std::uint64_t cost = prime_power_cost(m);
    bool maximal = true;
    for (std::uint64_t p : primes) {
      std::uint64_t current = 0;
      std::uint64_t next = p;
      for (const auto& pp : m.factors()) {
        if (pp.prime == static_cast<unsigned long>(p)) {
          Natural q;
          mpz_pow_ui(q.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
          fits_u64(q, current);
          next = current * p;
          break;
        }
      }
      if (cost - current + next <= n) {
        maximal = false;
        break;
      }
    }
    if (!maximal) continue;
    const auto counts = order_counts_on_lattice(n, m);
    for (const auto& [idx, c] : counts.nonzero()) {
      pmf.entries.emplace(counts.lattice().divisor(idx), c);
    }
  }
  return pmf;
}

ModeResult mode(std::uint64_t n, const Budget& budget, unsigned threads) {
  const auto candidates = support_factored(n, budget);

  // Seed with m = n: the n-cycles alone give A_n(n) >= (n-1)!.
  const FactoredInt seed = numtheory::factorize(n);
  Natural best = order_counts_on_lattice(n, seed).count_of(seed.value());
  std::vector<Natural> argmax{seed.value()};
  std::mutex guard;

  std::vector<const FactoredInt*> order;
  for (const auto& m : candidates) {
    if (m.value() != seed.value()) order.push_back(&m);
  }
  std::stable_sort(order.begin(), order.end(), [](const FactoredInt* a, const FactoredInt* b) {
    return numtheory::tau(*a) < numtheory::tau(*b);
  });

  parallel_for(order.size(), threads, [&](std::size_t i) {
    const FactoredInt& m = *order[i];
    const Natural bound = count_lengths_divide(n, m);
    {
      std::lock_guard lock(guard);
      if (bound < best) return;
    }
    const Natural count = order_counts_on_lattice(n, m).count_of(m.value());
    std::lock_guard lock(guard);
    if (count > best) {
      best = count;
      argmax.assign(1, m.value());
    } else if (count == best) {
      argmax.push_back(m.value());
    }
  });

  std::sort(argmax.begin(), argmax.end());
  Rational probability(best, factorial(n));
  probability.canonicalize();
  return ModeResult{n, std::move(argmax), std::move(best), std::move(probability)};
}

Rational collision_norm(std::uint64_t n, const Budget& budget) {
  const OrderPmf pmf = full_pmf(n, budget);
  Natural squares = 0;
  for (const auto& [m, c] : pmf.entries) squares += c * c;
  const Natural nf = factorial(n);
  Rational out(squares, nf * nf);
  out.canonicalize();
  return out;
}

Natural count_restricted_cycles(std::uint64_t n, std::uint64_t cycles,
                                const std::set<std::uint64_t>& allowed) {
  if (allowed.count(0) != 0) throw DomainError("cycle lengths must be >= 1");
  if (cycles > n) return Natural(0);
  // table[i][c]: permutations of [i] with c cycles, all lengths allowed.
  std::vector<std::vector<Natural>> table(n + 1, std::vector<Natural>(cycles + 1));
  table[0][0] = 1;
  for (std::uint64_t i = 1; i <= n; ++i) {
    Natural closures = 1;
    std::uint64_t t = 1;
    for (std::uint64_t j : allowed) {
      if (j > i) break;
      for (; t < j; ++t) closures *= to_natural(i - t);
      for (std::uint64_t c = 1; c <= cycles; ++c) {
        if (table[i - j][c - 1] != 0) table[i][c] += closures * table[i - j][c - 1];
      }
    }
  }
  return table[n][cycles];
}

bool at_or_above_tail(const Natural& m, std::uint64_t n, const Rational& eps) {
  // m >= n^(1 + p/q)  <=>  m^q >= n^(q + p)
  const Natural& p = eps.get_num();
  const Natural& q = eps.get_den();
  std::uint64_t pu = 0;
  std::uint64_t qu = 0;
  if (!fits_u64(p, pu) || !fits_u64(q, qu) || qu > UINT32_MAX || pu > UINT32_MAX) {
    throw DomainError("tail exponent " + to_string(eps) + " is too fine-grained");
  }
  Natural lhs;
  Natural rhs;
  mpz_pow_ui(lhs.get_mpz_t(), m.get_mpz_t(), qu);
  mpz_pow_ui(rhs.get_mpz_t(), to_natural(n).get_mpz_t(), qu + pu);
  return lhs >= rhs;
}

std::optional<TailMax> tail_max(std::uint64_t n, const Rational& eps, const Budget& budget) {
  if (sgn(eps) <= 0) throw DomainError("tail_max: eps must be positive");
  std::optional<TailMax> best;
  // 1 >= 1^(1+eps) holds formally, but a tail above the only order is treated as empty
  if (n <= 1) return best;
  Natural best_count = 0;
  for (const auto& m : support_factored(n, budget)) {
    if (!at_or_above_tail(m.value(), n, eps)) continue;
    if (best && count_lengths_divide(n, m) < best_count) continue;
    Natural count = order_counts_on_lattice(n, m).count_of(m.value());
    if (!best || count > best_count) {
      best_count = count;
      best = TailMax{m.value(), Rational(count, factorial(n))};
      best->probability.canonicalize();
    }
  }
  return best;
}

}  // namespace permorder::exactdist
