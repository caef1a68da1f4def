#include "permorder/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "permorder/brute_force.hpp"
#include "permorder/parallel.hpp"

namespace permorder::asymptotics {

using numtheory::FactoredInt;

namespace {

Rational ratio(const Natural& num, const Natural& den) {
  Rational out(num, den);
  out.canonicalize();
  return out;
}

Rational rational_pow(const Rational& base, std::uint64_t exponent) {
  Natural num;
  Natural den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  return ratio(num, den);
}

std::string describe_set(const std::set<std::uint64_t>& s) {
  std::string out = "{";
  for (auto it = s.begin(); it != s.end(); ++it) {
    if (it != s.begin()) out += ",";
    out += std::to_string(*it);
  }
  return out + "}";
}

}  // namespace

Rational eta(std::uint64_t n, std::uint64_t k) {
  if (k >= n) throw DomainError("eta: need k < n");
  if (k <= 1) return Rational(0);
  const unsigned log2k = static_cast<unsigned>(std::bit_width(k)) - 1;
  const std::uint64_t gap = n - k;
  if (log2k + 1 < 64 && gap % (std::uint64_t{1} << (log2k + 1)) == 0) return Rational(0);
  // 2^(1 - log2k) / gap^2 with log2k >= 1
  Natural den = to_natural(gap);
  den *= den;
  den <<= log2k - 1;
  return ratio(Natural(1), den);
}

Rational predicted_p(std::uint64_t n, std::uint64_t k) {
  if (!numtheory::compute_kn(n).contains(k)) {
    throw DomainError("k = " + std::to_string(k) + " is not in K_" + std::to_string(n));
  }
  return ratio(Natural(1), to_natural(n - k)) + eta(n, k);
}

EtaResidual eta_residual(std::uint64_t n, std::uint64_t k) {
  EtaResidual out{n, k, {}, predicted_p(n, k), {}};
  const FactoredInt target = numtheory::factorize(n - k);
  out.exact = ratio(exactdist::order_counts_on_lattice(n, target).count_of(target.value()),
                    factorial(n));
  out.residual = abs(out.exact - out.predicted);
  return out;
}

Rational bound_restricted(std::uint64_t n, std::uint64_t cycles,
                          const std::set<std::uint64_t>& allowed) {
  if (cycles == 0) throw DomainError("bound_restricted: cycle count must be >= 1");
  if (n == 0) throw DomainError("bound_restricted: n must be >= 1");
  Rational harmonic = 0;
  for (std::uint64_t i : allowed) {
    if (i == 0) throw DomainError("cycle lengths must be >= 1");
    harmonic += ratio(Natural(1), to_natural(i));
  }
  return rational_pow(harmonic, cycles - 1) / Rational(to_natural(n) * factorial(cycles - 1));
}

Rational bound_divisor(std::uint64_t n, std::uint64_t cycles, const FactoredInt& m) {
  if (cycles == 0) throw DomainError("bound_divisor: cycle count must be >= 1");
  if (n == 0) throw DomainError("bound_divisor: n must be >= 1");
  const Rational abundancy = ratio(numtheory::sigma(m), m.value());
  return rational_pow(abundancy, cycles - 1) / Rational(to_natural(n) * factorial(cycles - 1));
}

Rational bound_prime(std::uint64_t cycles, const FactoredInt& m) {
  if (cycles == 0) throw DomainError("bound_prime: cycle count must be >= 1");
  Natural num;
  mpz_ui_pow_ui(num.get_mpz_t(), cycles, numtheory::omega(m));
  return ratio(num, m.value());
}

Rational bound_tau(std::uint64_t n, const FactoredInt& m) {
  if (n == 0) throw DomainError("bound_tau: n must be >= 1");
  return ratio(to_natural(numtheory::tau(m)), to_natural(n));
}

std::string_view claim_tag(Claim claim) {
  switch (claim) {
    case Claim::large_mass_form: return "thm_1_1_form";
    case Claim::unique_mode: return "thm_1_2_mode";
    case Claim::final_inequality: return "final_inequality";
    case Claim::eta_residual: return "eta_residual";
    case Claim::refined_gap: return "refined_gap";
  }
  return "unknown";
}

Claim parse_claim_tag(std::string_view tag) {
  for (Claim c : {Claim::large_mass_form, Claim::unique_mode, Claim::final_inequality,
                  Claim::eta_residual, Claim::refined_gap}) {
    if (claim_tag(c) == tag) return c;
  }
  throw std::invalid_argument("unknown claim tag '" + std::string(tag) + "'");
}

VerificationReport verify_large_mass_form(std::uint64_t n, const exactdist::Budget& budget) {
  VerificationReport report{n, Claim::large_mass_form, {}, {}, {}};
  const auto kn = numtheory::compute_kn(n);
  const Natural nf = factorial(n);
  const Natural threshold = nf / to_natural(n);  // (n-1)!
  for (const auto& m : exactdist::support_factored(n, budget)) {
    // A_n(m) <= N_m(n), so small N_m(n) rules m out without the lattice pass.
    if (exactdist::count_lengths_divide(n, m) < threshold) continue;
    const Natural count = exactdist::order_counts_on_lattice(n, m).count_of(m.value());
    if (count < threshold) continue;
    Witness w{m.value(), ratio(count, nf)};
    const bool form_ok = m.value() <= to_natural(n) &&
                         kn.contains(n - m.value().get_ui());
    if (!form_ok) report.witnesses.push_back(w);
    report.evidence.push_back(std::move(w));
  }
  return report;
}

VerificationReport verify_unique_mode(std::uint64_t n, const exactdist::Budget& budget) {
  VerificationReport report{n, Claim::unique_mode, {}, {}, {}};
  const auto result = exactdist::mode(n, budget);
  const auto kn = numtheory::compute_kn(n);
  const Natural predicted = to_natural(n - kn.max_k);

  const bool holds = result.argmax.size() == 1 && result.argmax.front() == predicted;
  for (const auto& m : result.argmax) {
    report.evidence.push_back({m, result.max_probability});
    if (!holds) report.witnesses.push_back({m, result.max_probability});
  }
  if (!holds) report.evidence.push_back({predicted, exactdist::p_exact(n, predicted)});
  return report;
}

VerificationReport verify_final_inequality(std::uint64_t n) {
  if (n < 2) throw DomainError("verify_final_inequality: n must be >= 2");
  VerificationReport report{n, Claim::final_inequality, {}, {}, {}};
  const auto kn = numtheory::compute_kn(n);
  const std::uint64_t k0 = kn.max_k;
  for (std::uint64_t k : kn.members) {
    if (k == k0) continue;
    InequalityCheck check;
    check.k = k;
    check.lhs = ratio(to_natural(k0 - k), to_natural(n - k0) * to_natural(n - k)) + eta(n, k0) -
                eta(n, k);
    check.rhs = ratio(Natural(1), to_natural(n - k) * to_natural(n - k));
    const Natural gap = to_natural(k0 - k);
    check.lcm_divides_gap = mpz_divisible_p(gap.get_mpz_t(), numtheory::lcm_range(k).get_mpz_t()) != 0;
    Witness w{to_natural(k), check.lhs - check.rhs};
    if (check.lhs < check.rhs) report.witnesses.push_back(w);
    report.evidence.push_back(std::move(w));
    report.inequality_checks.push_back(std::move(check));
  }
  return report;
}

RefinedGap refined_gap(std::uint64_t n, const exactdist::Budget& budget) {
  if (n < 2) throw DomainError("refined_gap: n must be >= 2");
  const auto result = exactdist::mode(n, budget);
  RefinedGap out{n, result.max_probability - ratio(Natural(1), to_natural(n)), 0.0};
  const Rational scaled = out.excess * Rational(to_natural(n) * to_natural(n));
  out.ratio = to_double(scaled) / std::log(static_cast<double>(n));
  return out;
}

std::vector<VerificationReport> scan_counterexamples(std::uint64_t first, std::uint64_t last,
                                                     const exactdist::Budget& budget,
                                                     unsigned threads) {
  if (first == 0 || first > last) throw DomainError("scan_counterexamples: need 1 <= first <= last");
  std::vector<VerificationReport> reports(last - first + 1);
  parallel_for(reports.size(), threads,
               [&](std::size_t i) { reports[i] = verify_unique_mode(first + i, budget); });
  return reports;
}

std::vector<std::set<std::uint64_t>> structured_restriction_family(std::uint64_t n) {
  std::set<std::set<std::uint64_t>> family;
  for (std::uint64_t a = 1; a <= n; ++a) {
    for (std::uint64_t b = a; b <= n; ++b) {
      std::set<std::uint64_t> interval;
      for (std::uint64_t i = a; i <= b; ++i) interval.insert(i);
      family.insert(std::move(interval));
    }
  }
  auto divisor_set = [n](const FactoredInt& m) {
    std::set<std::uint64_t> out;
    const auto lattice = numtheory::divisors_of(m);
    for (const auto& d : lattice.divisors()) {
      if (d <= to_natural(n)) out.insert(d.get_ui());
    }
    return out;
  };
  for (std::uint64_t m = 1; m <= n; ++m) family.insert(divisor_set(numtheory::factorize(m)));
  for (const auto& m : exactdist::support_factored(n)) family.insert(divisor_set(m));

  std::vector<std::set<std::uint64_t>> out(family.begin(), family.end());
  for (const auto& s : std::vector(out)) {
    std::set<std::uint64_t> complement;
    for (std::uint64_t i = 1; i <= n; ++i) {
      if (s.count(i) == 0) complement.insert(i);
    }
    if (family.insert(complement).second) out.push_back(std::move(complement));
  }
  return out;
}

BoundsCheckSummary check_bounds_exhaustive(std::uint64_t n) {
  if (n == 0) throw DomainError("check_bounds_exhaustive: n must be >= 1");
  BoundsCheckSummary summary{n, 0, {}};

  // Cycle type (sorted lengths) -> number of permutations.
  std::map<std::vector<std::uint64_t>, std::uint64_t> census;
  exactdist::for_each_permutation(n, [&](std::span<const std::uint64_t> lengths) {
    std::vector<std::uint64_t> type(lengths.begin(), lengths.end());
    std::sort(type.begin(), type.end());
    ++census[type];
  });
  const Natural nf = factorial(n);

  auto probability_of = [&](auto&& predicate) {
    std::uint64_t hits = 0;
    for (const auto& [type, count] : census) {
      std::uint64_t order = 1;
      for (std::uint64_t len : type) order = std::lcm(order, len);
      if (predicate(type, order)) hits += count;
    }
    return ratio(to_natural(hits), nf);
  };
  auto compare = [&](std::string bound, std::string subject, std::uint64_t cycles,
                     const Rational& probability, const Rational& bound_value) {
    ++summary.comparisons;
    if (probability > bound_value) {
      summary.violations.push_back({std::move(bound), std::move(subject), cycles, probability, bound_value});
    }
  };

  for (const auto& allowed : structured_restriction_family(n)) {
    for (std::uint64_t cycles = 1; cycles <= n; ++cycles) {
      const Rational via_recursion =
          ratio(exactdist::count_restricted_cycles(n, cycles, allowed), nf);
      const Rational via_census = probability_of([&](const auto& type, std::uint64_t) {
        return type.size() == cycles &&
               std::all_of(type.begin(), type.end(), [&](std::uint64_t len) { return allowed.count(len) != 0; });
      });
      ++summary.comparisons;
      if (via_recursion != via_census) {
        summary.violations.push_back({"restricted_count_consistency", describe_set(allowed), cycles,
                                      via_recursion, via_census});
      }
      compare("restricted", describe_set(allowed), cycles, via_census,
              bound_restricted(n, cycles, allowed));
    }
  }

  const auto pmf = exactdist::full_pmf(n);
  for (const auto& m : exactdist::support_factored(n)) {
    const std::uint64_t mv = m.value().get_ui();
    const std::string subject = std::to_string(mv);
    for (std::uint64_t cycles = 1; cycles <= n; ++cycles) {
      compare("divisor", subject, cycles,
              probability_of([&](const auto& type, std::uint64_t order) {
                return type.size() == cycles && mv % order == 0;
              }),
              bound_divisor(n, cycles, m));
      compare("prime", subject, cycles,
              probability_of([&](const auto& type, std::uint64_t order) {
                return type.size() == cycles && order % mv == 0;
              }),
              bound_prime(cycles, m));
    }
    const Rational divides = probability_of([&](const auto&, std::uint64_t order) { return mv % order == 0; });
    compare("tau", subject, 0, divides, bound_tau(n, m));

    Natural from_pmf = 0;
    const auto lattice = numtheory::divisors_of(m);
    for (const auto& d : lattice.divisors()) from_pmf += pmf.count(d);
    ++summary.comparisons;
    if (ratio(from_pmf, nf) != divides) {
      summary.violations.push_back({"pmf_divisor_sum_consistency", subject, 0, ratio(from_pmf, nf), divides});
    }
  }
  return summary;
}

}  // namespace permorder::asymptotics
