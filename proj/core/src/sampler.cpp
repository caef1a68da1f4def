#include "permorder/sampler.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "permorder/exactdist.hpp"
#include "permorder/parallel.hpp"

namespace permorder::sampler {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Runs `trials` trials split into fixed blocks; block s uses substream s.
template <class Trial>
std::uint64_t run_blocks(std::uint64_t trials, std::uint64_t seed, unsigned threads, Trial trial) {
  const std::uint64_t blocks = (trials + kTrialsPerStream - 1) / kTrialsPerStream;
  std::vector<std::uint64_t> hits(blocks, 0);
  parallel_for(blocks, threads, [&](std::size_t s) {
    Rng rng(substream_seed(seed, s));
    const std::uint64_t count = std::min(kTrialsPerStream, trials - s * kTrialsPerStream);
    std::uint64_t local = 0;
    for (std::uint64_t t = 0; t < count; ++t) local += trial(rng) ? 1 : 0;
    hits[s] = local;
  });
  return std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
}

void require_trials(std::uint64_t trials) {
  if (trials == 0) throw DomainError("trials must be >= 1");
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
  u128 product = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64_mix(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

CycleType sample_cycle_type(std::uint64_t n, Rng& rng) {
  CycleType ct{n, {}};
  for (std::uint64_t x = n; x > 0;) {
    const std::uint64_t next = rng.below(x);
    ct.lengths.push_back(x - next);
    x = next;
  }
  assert(std::accumulate(ct.lengths.begin(), ct.lengths.end(), std::uint64_t{0}) == n);
  return ct;
}

Natural order_of(const CycleType& ct) {
  std::uint64_t small = 1;
  std::size_t i = 0;
  for (; i < ct.lengths.size(); ++i) {
    const std::uint64_t step = ct.lengths[i] / std::gcd(small, ct.lengths[i]);
    std::uint64_t next = 0;
    if (__builtin_mul_overflow(small, step, &next)) break;
    small = next;
  }
  Natural out = to_natural(small);
  for (; i < ct.lengths.size(); ++i) {
    mpz_lcm(out.get_mpz_t(), out.get_mpz_t(), to_natural(ct.lengths[i]).get_mpz_t());
  }
  return out;
}

std::uint64_t cycles_of(const CycleType& ct) { return ct.lengths.size(); }

bool is_restricted(const CycleType& ct, const std::set<std::uint64_t>& allowed) {
  return std::all_of(ct.lengths.begin(), ct.lengths.end(),
                     [&](std::uint64_t len) { return allowed.count(len) != 0; });
}

EstimateRecord make_estimate(std::string target, std::uint64_t n, std::uint64_t trials,
                             std::uint64_t hits, std::uint64_t seed) {
  require_trials(trials);
  const double estimate = static_cast<double>(hits) / static_cast<double>(trials);
  const double std_err = std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
  return EstimateRecord{std::move(target), n, trials, hits, estimate, std_err, seed};
}

EstimateRecord pool(std::span<const EstimateRecord> parts, std::uint64_t seed) {
  if (parts.empty()) throw DomainError("pool: nothing to pool");
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  for (const auto& p : parts) {
    trials += p.trials;
    hits += p.hits;
  }
  return make_estimate(parts.front().target, parts.front().n, trials, hits, seed);
}

EstimateRecord estimate_p(std::uint64_t n, const Natural& m, const RunOptions& options) {
  require_trials(options.trials);
  const std::uint64_t hits = run_blocks(options.trials, options.seed, options.threads, [&](Rng& rng) {
    return order_of(sample_cycle_type(n, rng)) == m;
  });
  return make_estimate("p(" + to_string(m) + ")", n, options.trials, hits, options.seed);
}

EstimateRecord estimate_p_stream(std::uint64_t n, const Natural& m, std::uint64_t trials,
                                 std::uint64_t stream_seed) {
  require_trials(trials);
  Rng rng(stream_seed);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) hits += order_of(sample_cycle_type(n, rng)) == m ? 1 : 0;
  return make_estimate("p(" + to_string(m) + ")", n, trials, hits, stream_seed);
}

EstimateRecord estimate_collision(std::uint64_t n, const RunOptions& options) {
  require_trials(options.trials);
  const std::uint64_t hits = run_blocks(options.trials, options.seed, options.threads, [&](Rng& rng) {
    const Natural first = order_of(sample_cycle_type(n, rng));
    return order_of(sample_cycle_type(n, rng)) == first;
  });
  return make_estimate("collision", n, options.trials, hits, options.seed);
}

std::string describe(const JointPredicate& predicate) {
  struct Visitor {
    std::string operator()(const RestrictedTo& r) const {
      std::string out = "restricted{";
      for (auto it = r.lengths.begin(); it != r.lengths.end(); ++it) {
        if (it != r.lengths.begin()) out += ",";
        out += std::to_string(*it);
      }
      return out + "}";
    }
    std::string operator()(const OrderDivisibleBy& d) const { return to_string(d.m) + "|ord"; }
    std::string operator()(const OrderDivides& d) const { return "ord|" + to_string(d.m); }
  };
  return std::visit(Visitor{}, predicate);
}

EstimateRecord joint_frequency(std::uint64_t n, std::uint64_t cycles, const JointPredicate& predicate,
                               const RunOptions& options) {
  require_trials(options.trials);
  auto satisfied = [&](const CycleType& ct) {
    if (const auto* r = std::get_if<RestrictedTo>(&predicate)) return is_restricted(ct, r->lengths);
    const Natural order = order_of(ct);
    if (const auto* d = std::get_if<OrderDivisibleBy>(&predicate)) {
      return mpz_divisible_p(order.get_mpz_t(), d->m.get_mpz_t()) != 0;
    }
    const auto& d = std::get<OrderDivides>(predicate);
    return mpz_divisible_p(d.m.get_mpz_t(), order.get_mpz_t()) != 0;
  };
  const std::uint64_t hits = run_blocks(options.trials, options.seed, options.threads, [&](Rng& rng) {
    const CycleType ct = sample_cycle_type(n, rng);
    return cycles_of(ct) == cycles && satisfied(ct);
  });
  return make_estimate("c=" + std::to_string(cycles) + "&" + describe(predicate), n, options.trials,
                       hits, options.seed);
}

ChiSquareResult chi_square_vs_exact(std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                    double significance, unsigned threads) {
  if (n == 0 || n > 8) throw DomainError("chi_square_vs_exact: need 1 <= n <= 8");
  require_trials(trials);
  const auto exact = exactdist::brute_force_pmf(n);
  const double total = static_cast<double>(factorial(n).get_ui());

  std::vector<std::uint64_t> orders;
  std::vector<double> expected;
  for (const auto& [m, c] : exact.entries) {
    orders.push_back(m.get_ui());
    expected.push_back(static_cast<double>(trials) * static_cast<double>(c.get_ui()) / total);
  }
  const double smallest = *std::min_element(expected.begin(), expected.end());
  if (smallest < 5.0) {
    throw DomainError("chi_square_vs_exact: " + std::to_string(trials) +
                      " trials give an expected bin count of " + std::to_string(smallest) +
                      " (< 5) at n = " + std::to_string(n));
  }

  const std::uint64_t blocks = (trials + kTrialsPerStream - 1) / kTrialsPerStream;
  std::vector<std::vector<std::uint64_t>> observed(blocks, std::vector<std::uint64_t>(orders.size(), 0));
  parallel_for(blocks, threads, [&](std::size_t s) {
    Rng rng(substream_seed(seed, s));
    const std::uint64_t count = std::min(kTrialsPerStream, trials - s * kTrialsPerStream);
    for (std::uint64_t t = 0; t < count; ++t) {
      const std::uint64_t order = order_of(sample_cycle_type(n, rng)).get_ui();
      const auto bin = std::lower_bound(orders.begin(), orders.end(), order) - orders.begin();
      ++observed[s][static_cast<std::size_t>(bin)];
    }
  });

  ChiSquareResult result{n, trials, seed, 0.0, orders.size() - 1, 1.0, true};
  for (std::size_t b = 0; b < orders.size(); ++b) {
    std::uint64_t o = 0;
    for (const auto& block : observed) o += block[b];
    const double diff = static_cast<double>(o) - expected[b];
    result.statistic += diff * diff / expected[b];
  }
  if (result.degrees_of_freedom > 0) {
    const boost::math::chi_squared dist(static_cast<double>(result.degrees_of_freedom));
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  }
  result.pass = result.p_value >= significance;
  return result;
}

}  // namespace permorder::sampler
