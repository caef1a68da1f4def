#include <gtest/gtest.h>

#include "oracles.hpp"
#include "permorder/exactdist.hpp"

namespace permorder::exactdist {
namespace {

using numtheory::factorize;
using testing::frac;

std::map<Natural, Natural> as_map(std::initializer_list<std::pair<long, long>> items) {
  std::map<Natural, Natural> out;
  for (auto [m, c] : items) out[Natural(m)] = Natural(c);
  return out;
}

TEST(CountLengthsDivide, Examples) {
  for (std::uint64_t n = 0; n <= 12; ++n) EXPECT_EQ(count_lengths_divide(n, factorize(1)), 1) << n;
  EXPECT_EQ(count_lengths_divide(3, factorize(2)), 4);
  EXPECT_EQ(count_lengths_divide(0, factorize(360)), 1);
}

TEST(CountLengthsDivide, MatchesPartitions) {
  for (std::uint64_t n = 0; n <= 14; ++n) {
    for (std::uint64_t d : {1UL, 2UL, 3UL, 4UL, 6UL, 12UL, 60UL}) {
      Natural expected = n == 0 ? Natural(1) : Natural(0);
      if (n > 0) {
        for (const auto& type : testing::partitions(n)) {
          if (d % testing::lcm_of(type) == 0) expected += testing::class_size(type);
        }
      }
      ASSERT_EQ(count_lengths_divide(n, factorize(d)), expected) << n << " " << d;
    }
  }
}

TEST(LatticeCounts, Examples) {
  const auto v = order_counts_on_lattice(3, factorize(6));
  EXPECT_EQ(v.count_of(Natural(1)), 1);
  EXPECT_EQ(v.count_of(Natural(2)), 3);
  EXPECT_EQ(v.count_of(Natural(3)), 2);
  EXPECT_EQ(v.count_of(Natural(6)), 0);
  EXPECT_EQ(v.count_of(Natural(5)), 0);
  EXPECT_EQ(v.total(), 6);

  const auto empty = order_counts_on_lattice(0, factorize(12));
  EXPECT_EQ(empty.count_of(Natural(1)), 1);
  EXPECT_EQ(empty.total(), 1);
  EXPECT_EQ(empty.nonzero().size(), 1U);

  EXPECT_EQ(order_counts_on_lattice(5, factorize(4)).count_of(Natural(4)), 30);
}

TEST(LatticeCounts, TotalIsNmAndIdentityIsCounted) {
  for (std::uint64_t n = 0; n <= 20; ++n) {
    for (std::uint64_t m : {1UL, 6UL, 12UL, 60UL, 420UL}) {
      const auto v = order_counts_on_lattice(n, factorize(m));
      ASSERT_EQ(v.total(), count_lengths_divide(n, factorize(m)));
      ASSERT_EQ(v.count_of(Natural(1)), 1);
    }
  }
}

TEST(Mobius, Examples) {
  EXPECT_EQ(count_order_exactly_mobius(3, factorize(2)), 3);
  for (std::uint64_t n = 0; n <= 10; ++n) EXPECT_EQ(count_order_exactly_mobius(n, factorize(1)), 1);
  EXPECT_EQ(count_order_exactly_mobius(5, factorize(6)), 20);
}

TEST(Mobius, AgreesWithLatticeOverSupport) {
  for (std::uint64_t n = 1; n <= 20; ++n) {
    for (const auto& m : support_factored(n)) {
      ASSERT_EQ(order_counts_on_lattice(n, m).count_of(m.value()), count_order_exactly_mobius(n, m))
          << n << " " << m.value().get_str();
    }
  }
}

TEST(Achievable, Examples) {
  EXPECT_TRUE(is_achievable(factorize(6), 5));
  EXPECT_FALSE(is_achievable(factorize(6), 4));
  EXPECT_TRUE(is_achievable(factorize(1), 0));
  EXPECT_TRUE(is_achievable(factorize(4), 4));
  EXPECT_FALSE(is_achievable(factorize(8), 7));
}

TEST(PExact, Examples) {
  EXPECT_EQ(p_exact(3, Natural(2)), frac(1, 2));
  EXPECT_EQ(p_exact(4, Natural(2)), frac(3, 8));
  EXPECT_EQ(p_exact(4, Natural(5)), 0);
  EXPECT_EQ(p_exact(1, Natural(1)), 1);
  for (std::uint64_t n = 1; n <= 40; ++n) ASSERT_GE(p_exact(n, to_natural(n)), frac(1, static_cast<long>(n)));
  EXPECT_THROW(p_exact(0, Natural(1)), DomainError);
  EXPECT_THROW(p_exact(3, Natural(0)), DomainError);
}

TEST(Support, Examples) {
  EXPECT_EQ(support(1), (std::vector<Natural>{1}));
  EXPECT_EQ(support(3), (std::vector<Natural>{1, 2, 3}));
  EXPECT_EQ(support(5), (std::vector<Natural>{1, 2, 3, 4, 5, 6}));
}

TEST(Support, MatchesPartitionsAndLandau) {
  for (std::uint64_t n = 1; n <= 25; ++n) {
    std::vector<Natural> expected;
    for (const auto& [m, c] : testing::pmf_by_partitions(n)) expected.push_back(to_natural(m));
    const auto s = support(n);
    ASSERT_EQ(s, expected) << n;
    ASSERT_EQ(support_size(n), s.size());
    ASSERT_EQ(s.back(), numtheory::landau_g(n));
  }
  EXPECT_EQ(support_size(100), 18663);
}

TEST(Support, BudgetIsEnforced) {
  Budget tight;
  tight.max_support = 10;
  EXPECT_THROW(support(20, tight), BudgetExceeded);
  Budget small_n;
  small_n.max_n = 10;
  EXPECT_THROW(full_pmf(11, small_n), BudgetExceeded);
  EXPECT_THROW(mode(11, small_n), BudgetExceeded);
}

TEST(FullPmf, Examples) {
  EXPECT_EQ(full_pmf(3).entries, as_map({{1, 1}, {2, 3}, {3, 2}}));
  EXPECT_EQ(full_pmf(4).entries, as_map({{1, 1}, {2, 9}, {3, 8}, {4, 6}}));
  EXPECT_EQ(full_pmf(6).total(), 720);
  EXPECT_EQ(full_pmf(4).probability(Natural(2)), frac(3, 8));
  EXPECT_EQ(full_pmf(4).count(Natural(7)), 0);
}

TEST(FullPmf, MatchesBruteForceAndPartitions) {
  for (std::uint64_t n = 1; n <= 8; ++n) ASSERT_EQ(full_pmf(n), brute_force_pmf(n)) << n;
  for (std::uint64_t n = 1; n <= 22; ++n) {
    std::map<Natural, Natural> expected;
    for (const auto& [m, c] : testing::pmf_by_partitions(n)) expected[to_natural(m)] = c;
    ASSERT_EQ(full_pmf(n).entries, expected) << n;
  }
}

TEST(FullPmf, InvariantsUpTo40) {
  for (std::uint64_t n = 1; n <= 40; ++n) {
    const auto pmf = full_pmf(n);
    ASSERT_EQ(pmf.total(), factorial(n)) << n;
    ASSERT_GE(pmf.count(to_natural(n)), factorial(n - 1));
    for (const auto& [m, c] : pmf.entries) {
      ASSERT_TRUE(is_achievable(factorize(m), n));
      ASSERT_LE(c, count_lengths_divide(n, factorize(m)));
    }
    // an (n-k)-cycle with k in K_n and n-k > n/2 forces order n-k
    for (auto k : numtheory::compute_kn(n).members) {
      if (2 * (n - k) > n) ASSERT_GE(pmf.count(to_natural(n - k)) * (n - k), factorial(n)) << n << " " << k;
    }
  }
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(brute_force_pmf(1).entries, as_map({{1, 1}}));
  EXPECT_EQ(brute_force_pmf(3).entries, as_map({{1, 1}, {2, 3}, {3, 2}}));
  EXPECT_EQ(brute_force_pmf(4).entries, as_map({{1, 1}, {2, 9}, {3, 8}, {4, 6}}));
  EXPECT_THROW(brute_force_pmf(10), DomainError);
}

TEST(Mode, SmallTable) {
  struct Row {
    std::uint64_t n;
    std::vector<Natural> argmax;
    Rational m;
  };
  const std::vector<Row> rows = {
      {1, {1}, frac(1, 1)},  {2, {1, 2}, frac(1, 2)}, {3, {2}, frac(1, 2)},   {4, {2}, frac(3, 8)},
      {5, {4}, frac(1, 4)},  {6, {6}, frac(1, 3)},    {7, {6}, frac(7, 24)},  {8, {6}, frac(19, 72)},
  };
  for (const auto& row : rows) {
    const auto r = mode(row.n);
    EXPECT_EQ(r.argmax, row.argmax) << row.n;
    EXPECT_EQ(r.max_probability, row.m) << row.n;
  }
}

TEST(Mode, MatchesPartitionArgmax) {
  for (std::uint64_t n = 1; n <= 24; ++n) {
    const auto pmf = testing::pmf_by_partitions(n);
    Natural best = 0;
    for (const auto& [m, c] : pmf) best = std::max(best, c);
    std::vector<Natural> argmax;
    for (const auto& [m, c] : pmf) {
      if (c == best) argmax.push_back(to_natural(m));
    }
    const auto r = mode(n);
    ASSERT_EQ(r.argmax, argmax) << n;
    ASSERT_EQ(r.max_count, best) << n;
  }
}

TEST(Mode, ThreadCountDoesNotChangeResult) {
  for (std::uint64_t n : {17UL, 30UL, 36UL, 43UL}) {
    const auto one = mode(n, {}, 1);
    const auto four = mode(n, {}, 4);
    EXPECT_EQ(one.argmax, four.argmax);
    EXPECT_EQ(one.max_count, four.max_count);
  }
  EXPECT_EQ(mode(17).argmax, (std::vector<Natural>{30}));
  EXPECT_EQ(mode(30).argmax, (std::vector<Natural>{30}));
  EXPECT_EQ(mode(36).argmax, (std::vector<Natural>{36}));
  EXPECT_EQ(mode(43).argmax, (std::vector<Natural>{120}));
}

TEST(Collision, Examples) {
  EXPECT_EQ(collision_norm(1), 1);
  EXPECT_EQ(collision_norm(2), frac(1, 2));
  EXPECT_EQ(collision_norm(3), frac(7, 18));
  EXPECT_EQ(collision_norm(4), frac(91, 288));
  EXPECT_EQ(collision_norm(5), frac(1451, 7200));
  for (std::uint64_t n = 1; n <= 30; ++n) {
    ASSERT_GE(collision_norm(n) * to_natural(n * n), 1) << n;
  }
}

TEST(RestrictedCycles, Examples) {
  EXPECT_EQ(count_restricted_cycles(5, 1, {1, 2, 3, 4, 5}), 24);
  EXPECT_EQ(count_restricted_cycles(4, 4, {1}), 1);
  EXPECT_EQ(count_restricted_cycles(4, 2, {2}), 3);
  EXPECT_EQ(count_restricted_cycles(0, 0, {}), 1);
  EXPECT_THROW(count_restricted_cycles(3, 1, {0, 3}), DomainError);
}

TEST(RestrictedCycles, StirlingColumns) {
  const auto c = testing::stirling_first(12);
  for (std::uint64_t n = 0; n <= 12; ++n) {
    std::set<std::uint64_t> all;
    for (std::uint64_t j = 1; j <= n; ++j) all.insert(j);
    Natural sum = 0;
    for (std::uint64_t l = 0; l <= n; ++l) {
      const auto v = count_restricted_cycles(n, l, all);
      ASSERT_EQ(v, c[n][l]) << n << " " << l;
      sum += v;
    }
    ASSERT_EQ(sum, factorial(n));
  }
}

TEST(TailMax, Examples) {
  EXPECT_FALSE(tail_max(6, frac(3, 10)).has_value());
  EXPECT_FALSE(tail_max(1, frac(1, 2)).has_value());

  const auto t = tail_max(10, frac(3, 10));
  ASSERT_TRUE(t.has_value());
  EXPECT_GE(t->m, 20);
  const auto pmf = full_pmf(10);
  Rational best = 0;
  Natural arg = 0;
  for (const auto& [m, c] : pmf.entries) {
    if (m >= 20 && pmf.probability(m) > best) {
      best = pmf.probability(m);
      arg = m;
    }
  }
  EXPECT_EQ(t->m, arg);
  EXPECT_EQ(t->probability, best);
  EXPECT_THROW(tail_max(10, Rational(0)), DomainError);
}

TEST(TailMax, ThresholdIsExact) {
  // 4^(3/2) = 8 exactly
  EXPECT_TRUE(at_or_above_tail(Natural(8), 4, frac(1, 2)));
  EXPECT_FALSE(at_or_above_tail(Natural(7), 4, frac(1, 2)));
  // 6^1.3 ~ 10.27
  EXPECT_FALSE(at_or_above_tail(Natural(10), 6, frac(3, 10)));
  EXPECT_TRUE(at_or_above_tail(Natural(11), 6, frac(3, 10)));
}

}  // namespace
}  // namespace permorder::exactdist
