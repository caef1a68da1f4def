#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "permorder/types.hpp"

namespace permorder::sampler {

/// 64-bit Mersenne Twister with unbiased bounded draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on {0, ..., bound-1} by multiply-shift with a rejection step on
  /// the low word, so there is no modulo bias. bound must be >= 1.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Seed of substream `stream` under `master`: the splitmix64 finalizer applied
/// to master + (stream + 1) * 0x9E3779B97F4A7C15.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream);

/// Trials are cut into consecutive blocks of this size; block s always draws
/// from substream s, whatever the number of worker threads.
inline constexpr std::uint64_t kTrialsPerStream = std::uint64_t{1} << 16;

struct CycleType {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> lengths;  // in the order the chain produced them
};

/// Runs X_0 = n, X_{j+1} uniform on {0, ..., X_j - 1} down to 0 and returns
/// the decrements, which are distributed as the cycle lengths of a uniform
/// permutation of [n].
CycleType sample_cycle_type(std::uint64_t n, Rng& rng);

/// lcm of the lengths, without any fixed-width truncation.
Natural order_of(const CycleType& ct);
std::uint64_t cycles_of(const CycleType& ct);
bool is_restricted(const CycleType& ct, const std::set<std::uint64_t>& allowed);

struct EstimateRecord {
  std::string target;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t hits = 0;
  double estimate = 0.0;
  double std_err = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const EstimateRecord&, const EstimateRecord&) = default;
};

EstimateRecord make_estimate(std::string target, std::uint64_t n, std::uint64_t trials,
                             std::uint64_t hits, std::uint64_t seed);

/// Sums hits and trials; the pooled record carries `seed`.
EstimateRecord pool(std::span<const EstimateRecord> parts, std::uint64_t seed);

struct RunOptions {
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

EstimateRecord estimate_p(std::uint64_t n, const Natural& m, const RunOptions& options);

/// All trials from a single generator seeded with `stream_seed`.
EstimateRecord estimate_p_stream(std::uint64_t n, const Natural& m, std::uint64_t trials,
                                 std::uint64_t stream_seed);

/// Two independent cycle types per trial; a hit is equal orders.
EstimateRecord estimate_collision(std::uint64_t n, const RunOptions& options);

struct RestrictedTo {
  std::set<std::uint64_t> lengths;
};
struct OrderDivisibleBy {  // m | ord
  Natural m;
};
struct OrderDivides {  // ord | m
  Natural m;
};
using JointPredicate = std::variant<RestrictedTo, OrderDivisibleBy, OrderDivides>;

std::string describe(const JointPredicate& predicate);

/// Frequency of {c = cycles} together with the predicate.
EstimateRecord joint_frequency(std::uint64_t n, std::uint64_t cycles, const JointPredicate& predicate,
                               const RunOptions& options);

struct ChiSquareResult {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double statistic = 0.0;
  std::uint64_t degrees_of_freedom = 0;
  double p_value = 1.0;
  bool pass = true;
};

/// Pearson goodness of fit of sampled orders against the enumerated
/// distribution (n <= 8). Throws DomainError if any expected bin count is
/// below 5.
ChiSquareResult chi_square_vs_exact(std::uint64_t n, std::uint64_t trials, std::uint64_t seed,
                                    double significance = 1e-3, unsigned threads = 1);

}  // namespace permorder::sampler
