#include "permorder/brute_force.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "permorder/exactdist.hpp"

namespace permorder::exactdist {

void for_each_permutation(std::uint64_t n,
                          const std::function<void(std::span<const std::uint64_t>)>& visit) {
  if (n > kBruteForceLimit) {
    throw DomainError("brute force enumeration limited to n <= " +
                      std::to_string(kBruteForceLimit) + ", got " + std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<bool> seen(n);
  std::vector<std::uint64_t> lengths;
  do {
    std::fill(seen.begin(), seen.end(), false);
    lengths.clear();
    for (std::size_t start = 0; start < n; ++start) {
      if (seen[start]) continue;
      std::uint64_t len = 0;
      for (std::size_t x = start; !seen[x]; x = perm[x]) {
        seen[x] = true;
        ++len;
      }
      lengths.push_back(len);
    }
    visit(lengths);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

OrderPmf brute_force_pmf(std::uint64_t n) {
  std::map<std::uint64_t, std::uint64_t> tally;
  for_each_permutation(n, [&](std::span<const std::uint64_t> lengths) {
    std::uint64_t order = 1;
    for (std::uint64_t len : lengths) order = std::lcm(order, len);
    ++tally[order];
  });
  OrderPmf pmf{n, {}};
  for (const auto& [m, c] : tally) pmf.entries.emplace(to_natural(m), to_natural(c));
  return pmf;
}

}  // namespace permorder::exactdist
