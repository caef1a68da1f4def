#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "permorder/exactdist.hpp"
#include "permorder/numtheory.hpp"
#include "permorder/types.hpp"

namespace permorder::asymptotics {

/// Second-order correction to p_n(n-k), coming from permutations with two
/// cycles of length (n-k)/2:
///   0                              if k <= 1 or 2^(floor(log2 k)+1) | n-k
///   2^(1-floor(log2 k)) / (n-k)^2  otherwise
Rational eta(std::uint64_t n, std::uint64_t k);

/// 1/(n-k) + eta(n,k). Throws DomainError unless k is in K_n.
Rational predicted_p(std::uint64_t n, std::uint64_t k);

struct EtaResidual {
  std::uint64_t n = 0;
  std::uint64_t k = 0;
  Rational exact;      // p_n(n-k)
  Rational predicted;  // 1/(n-k) + eta(n,k)
  Rational residual;   // |exact - predicted|
};

/// Needs only the lattice recursion for the single order n-k.
EtaResidual eta_residual(std::uint64_t n, std::uint64_t k);

// Upper bounds on joint (cycle count, order) events. All are exact rationals.

/// (sum_{i in I} 1/i)^(l-1) / (n (l-1)!)
Rational bound_restricted(std::uint64_t n, std::uint64_t cycles, const std::set<std::uint64_t>& allowed);
/// (sigma(m)/m)^(l-1) / (n (l-1)!)
Rational bound_divisor(std::uint64_t n, std::uint64_t cycles, const numtheory::FactoredInt& m);
/// l^omega(m) / m
Rational bound_prime(std::uint64_t cycles, const numtheory::FactoredInt& m);
/// tau(m) / n
Rational bound_tau(std::uint64_t n, const numtheory::FactoredInt& m);

enum class Claim { large_mass_form, unique_mode, final_inequality, eta_residual, refined_gap };

/// Wire tags used in stored records and CLI output.
std::string_view claim_tag(Claim claim);
Claim parse_claim_tag(std::string_view tag);

struct Witness {
  Natural subject;  // an order m, or an index k, depending on the claim
  Rational value;
};

struct InequalityCheck {
  std::uint64_t k = 0;
  Rational lhs;
  Rational rhs;
  bool lcm_divides_gap = false;  // lcm(1..k) | k0 - k
};

struct VerificationReport {
  std::uint64_t n = 0;
  Claim claim = Claim::unique_mode;
  std::vector<Witness> witnesses;  // offending items; empty iff the claim holds
  std::vector<Witness> evidence;   // everything examined, with exact values
  std::vector<InequalityCheck> inequality_checks;

  bool holds() const { return witnesses.empty(); }
};

/// Every m with p_n(m) >= 1/n must be n-k for some k in K_n.
VerificationReport verify_large_mass_form(std::uint64_t n, const exactdist::Budget& budget = {});

/// The mode is unique and equals n - max K_n. Ties count as failure.
VerificationReport verify_unique_mode(std::uint64_t n, const exactdist::Budget& budget = {});

/// For k in K_n \ {k0}, k0 = max K_n:
///   (k0-k)/((n-k0)(n-k)) + eta(n,k0) - eta(n,k) >= 1/(n-k)^2
VerificationReport verify_final_inequality(std::uint64_t n);

struct RefinedGap {
  std::uint64_t n = 0;
  Rational excess;     // M(n) - 1/n, exact
  double ratio = 0.0;  // excess * n^2 / ln n
};

RefinedGap refined_gap(std::uint64_t n, const exactdist::Budget& budget = {});

/// verify_unique_mode over [first, last], reports in increasing n.
std::vector<VerificationReport> scan_counterexamples(std::uint64_t first, std::uint64_t last,
                                                     const exactdist::Budget& budget = {},
                                                     unsigned threads = 1);

struct BoundViolation {
  std::string bound;    // which inequality
  std::string subject;  // I, or m
  std::uint64_t cycles = 0;
  Rational probability;
  Rational bound_value;
};

struct BoundsCheckSummary {
  std::uint64_t n = 0;
  std::uint64_t comparisons = 0;
  std::vector<BoundViolation> violations;

  bool holds() const { return violations.empty(); }
};

/// Restriction sets used by the exhaustive check: all intervals, divisor
/// sets of 1..n and of every support element, and complements of those in [1, n].
std::vector<std::set<std::uint64_t>> structured_restriction_family(std::uint64_t n);

/// Compares every cycle-count/order bound against brute-force
/// probabilities over all of S_n. Also cross-checks the restricted-cycle
/// recursion and the full pmf against the same enumeration.
BoundsCheckSummary check_bounds_exhaustive(std::uint64_t n);

}  // namespace permorder::asymptotics
