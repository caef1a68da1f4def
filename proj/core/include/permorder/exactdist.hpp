#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "permorder/numtheory.hpp"
#include "permorder/types.hpp"

namespace permorder::exactdist {

/// Resource caps for whole-distribution operations. Exceeding either one
/// raises BudgetExceeded instead of degrading silently.
struct Budget {
  std::uint64_t max_n = 100;
  std::uint64_t max_support = 5'000'000;
};

/// N_d(n): permutations of [n] all of whose cycle lengths divide d.
Natural count_lengths_divide(std::uint64_t n, const numtheory::FactoredInt& d);

/// Same count for an explicit set of allowed cycle lengths (ascending, all >= 1).
Natural count_lengths_in(std::uint64_t n, const std::vector<std::uint64_t>& allowed);

/// Exact order counts for every divisor of a fixed m.
///
/// Zero entries are not stored. The lattice is shared so vectors for the same
/// m are cheap to copy.
class LatticeCountVector {
 public:
  LatticeCountVector(std::uint64_t n, std::shared_ptr<const numtheory::DivisorLattice> lattice,
                     std::map<std::size_t, Natural> counts);

  std::uint64_t n() const { return n_; }
  const numtheory::DivisorLattice& lattice() const { return *lattice_; }
  const std::map<std::size_t, Natural>& nonzero() const { return counts_; }

  Natural count_at(std::size_t index) const;
  /// Count for an arbitrary natural; 0 if it is not a divisor of m.
  Natural count_of(const Natural& order) const;
  /// Sum over all divisors, i.e. N_m(n).
  Natural total() const;

 private:
  std::uint64_t n_;
  std::shared_ptr<const numtheory::DivisorLattice> lattice_;
  std::map<std::size_t, Natural> counts_;
};

/// First-cycle recursion over the divisor lattice of m:
/// B(i, e) = sum_{j | m, j <= i} (i-1)...(i-j+1) * sum_{lcm(d, j) = e} B(i-j, d).
LatticeCountVector order_counts_on_lattice(std::uint64_t n, const numtheory::FactoredInt& m);
LatticeCountVector order_counts_on_lattice(std::uint64_t n,
                                           std::shared_ptr<const numtheory::DivisorLattice> lattice);

/// A_n(m) by inclusion-exclusion: sum_{d | m} mu(m/d) N_d(n). Shares no
/// code path with the lattice recursion.
Natural count_order_exactly_mobius(std::uint64_t n, const numtheory::FactoredInt& m);

/// True if some permutation of [n] has order m: the prime-power parts of m sum to at most n.
bool is_achievable(const numtheory::FactoredInt& m, std::uint64_t n);

/// p_n(m) = A_n(m) / n!; zero for unachievable m.
Rational p_exact(std::uint64_t n, const Natural& m);

/// Number of achievable orders, computed by a counting knapsack without enumeration.
Natural support_size(std::uint64_t n);

/// Achievable orders of permutations of [n], ascending, with factorizations.
std::vector<numtheory::FactoredInt> support_factored(std::uint64_t n, const Budget& budget = {});
std::vector<Natural> support(std::uint64_t n, const Budget& budget = {});

/// Exact distribution of the order: m -> A_n(m), with n! implicit.
struct OrderPmf {
  std::uint64_t n = 0;
  std::map<Natural, Natural> entries;

  Natural total() const;
  Natural count(const Natural& m) const;
  Rational probability(const Natural& m) const;

  friend bool operator==(const OrderPmf&, const OrderPmf&) = default;
};

OrderPmf full_pmf(std::uint64_t n, const Budget& budget = {});

struct ModeResult {
  std::uint64_t n = 0;
  std::vector<Natural> argmax;  // ascending; all tied maximizers
  Natural max_count;
  Rational max_probability;  // M(n) = max_count / n!
};

/// Pruned exact search for the mode. Candidates whose N_m(n) falls below the
/// incumbent count are skipped; survivors get the full lattice recursion.
ModeResult mode(std::uint64_t n, const Budget& budget = {}, unsigned threads = 1);

/// Sum_m A_n(m)^2 / (n!)^2.
Rational collision_norm(std::uint64_t n, const Budget& budget = {});

/// Permutations of [n] with exactly `cycles` cycles, all lengths in `allowed`.
Natural count_restricted_cycles(std::uint64_t n, std::uint64_t cycles,
                                const std::set<std::uint64_t>& allowed);

struct TailMax {
  Natural m;
  Rational probability;
};

/// Largest p_n(m) over support elements with m >= n^(1+eps); smallest m on
/// ties. Empty when no support element clears the threshold, and for n = 1.
std::optional<TailMax> tail_max(std::uint64_t n, const Rational& eps, const Budget& budget = {});

/// m >= n^(1+eps), decided exactly for rational eps > 0.
bool at_or_above_tail(const Natural& m, std::uint64_t n, const Rational& eps);

/// Ground truth by enumerating all n! permutations (n <= 9).
OrderPmf brute_force_pmf(std::uint64_t n);

}  // namespace permorder::exactdist
