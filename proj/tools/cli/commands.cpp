#include "cli/commands.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "permorder/asymptotics.hpp"
#include "permorder/numtheory.hpp"
#include "permorder/parallel.hpp"
#include "permorder/sampler.hpp"
#include "permorder/store.hpp"

namespace permorder::cli {

using nlohmann::json;
using store::RecordKind;
using store::ResultRecord;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Outcome {
  Table table;
  bool findings = false;
};

json natural_cell(const Natural& value) {
  std::uint64_t small = 0;
  if (fits_u64(value, small)) return small;
  return to_string(value);
}

json natural_list(const std::vector<Natural>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(natural_cell(v));
  return out;
}

std::vector<std::uint64_t> range_values(const NRange& r) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = r.first; n <= r.last; ++n) out.push_back(n);
  return out;
}

void require_positive(const NRange& r) {
  if (r.first == 0) throw UsageError("--n must be >= 1");
}

// Records for every n in the range, either computed directly or through the
// resumable store when a cache directory is configured. Latest record per n wins.
std::map<std::uint64_t, std::vector<ResultRecord>> records_for_range(
    const CommandConfig& cfg, const std::string& scan_id, RecordKind kind,
    const std::function<std::vector<ResultRecord>(std::uint64_t)>& compute, std::ostream& err) {
  std::map<std::uint64_t, std::vector<ResultRecord>> out;
  if (!cfg.cache_dir) {
    const auto ns = range_values(cfg.n);
    std::vector<std::vector<ResultRecord>> results(ns.size());
    parallel_for(ns.size(), cfg.threads, [&](std::size_t i) { results[i] = compute(ns[i]); });
    for (std::size_t i = 0; i < ns.size(); ++i) out[ns[i]] = std::move(results[i]);
    return out;
  }
  store::Store db(*cfg.cache_dir, [&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
  const auto computed =
      store::run_resumable_scan(db, scan_id, cfg.n.first, cfg.n.last, cfg.threads, compute);
  err << "cache: " << scan_id << ": computed " << computed << " of " << cfg.n.size() << " n\n";
  for (auto& r : db.load(kind, cfg.n.first, cfg.n.last)) {
    auto& slot = out[r.n];
    // One record per n for these kinds; a crash between append and
    // checkpoint can leave a duplicate, and the later one wins.
    slot.assign(1, std::move(r));
  }
  return out;
}

Outcome cmd_kn(const CommandConfig& cfg) {
  require_positive(cfg.n);
  Table t("kn", {{"n", ColumnKind::integer}, {"members", ColumnKind::list}, {"max_k", ColumnKind::integer}});
  for (std::uint64_t n : range_values(cfg.n)) {
    const auto kn = numtheory::compute_kn(n);
    t.add_row({n, kn.members, kn.max_k});
  }
  return {std::move(t), false};
}

Outcome cmd_landau(const CommandConfig& cfg) {
  Table t("landau", {{"n", ColumnKind::integer}, {"g", ColumnKind::big}});
  for (std::uint64_t n : range_values(cfg.n)) t.add_row({n, to_string(numtheory::landau_g(n))});
  return {std::move(t), false};
}

Outcome cmd_pmf(const CommandConfig& cfg) {
  require_positive(cfg.n);
  Table t("pmf", {{"n", ColumnKind::integer},
                  {"m", ColumnKind::big},
                  {"count", ColumnKind::big},
                  {"p", ColumnKind::rational}});
  for (std::uint64_t n : range_values(cfg.n)) {
    const auto pmf = exactdist::full_pmf(n, cfg.budget);
    for (const auto& [m, c] : pmf.entries) {
      t.add_row({n, to_string(m), to_string(c), to_string(pmf.probability(m))});
    }
  }
  return {std::move(t), false};
}

Outcome cmd_mode(const CommandConfig& cfg, std::ostream& err) {
  require_positive(cfg.n);
  const auto records = records_for_range(
      cfg, "mode", RecordKind::mode,
      [&](std::uint64_t n) { return std::vector{store::encode(exactdist::mode(n, cfg.budget))}; }, err);
  Table t("mode", {{"n", ColumnKind::integer},
                   {"argmax", ColumnKind::list},
                   {"max_count", ColumnKind::big},
                   {"M", ColumnKind::rational}});
  for (const auto& [n, recs] : records) {
    for (const auto& r : recs) {
      const auto m = store::decode_mode(r);
      t.add_row({n, natural_list(m.argmax), to_string(m.max_count), to_string(m.max_probability)});
    }
  }
  return {std::move(t), false};
}

Outcome cmd_collision(const CommandConfig& cfg) {
  require_positive(cfg.n);
  Table t("collision", {{"n", ColumnKind::integer},
                        {"collision", ColumnKind::rational},
                        {"collision_times_n2", ColumnKind::rational}});
  const auto ns = range_values(cfg.n);
  std::vector<Rational> values(ns.size());
  parallel_for(ns.size(), cfg.threads, [&](std::size_t i) { values[i] = exactdist::collision_norm(ns[i], cfg.budget); });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const Rational scaled = values[i] * Rational(to_natural(ns[i]) * to_natural(ns[i]));
    t.add_row({ns[i], to_string(values[i]), to_string(scaled)});
  }
  return {std::move(t), false};
}

Outcome cmd_eta_check(const CommandConfig& cfg, std::ostream& err) {
  require_positive(cfg.n);
  std::optional<std::uint64_t> fixed_k;
  if (cfg.k != "max") {
    try {
      fixed_k = std::stoull(cfg.k);
    } catch (const std::exception&) {
      throw UsageError("--k must be 'max' or a natural number, got '" + cfg.k + "'");
    }
  }
  const auto records = records_for_range(
      cfg, "eta-check-k" + cfg.k, RecordKind::eta_residual,
      [&](std::uint64_t n) {
        const auto kn = numtheory::compute_kn(n);
        const std::uint64_t k = fixed_k.value_or(kn.max_k);
        if (!kn.contains(k)) return std::vector<ResultRecord>{};
        return std::vector{store::encode(asymptotics::eta_residual(n, k))};
      },
      err);
  Table t("eta-check", {{"n", ColumnKind::integer},
                        {"k", ColumnKind::integer},
                        {"exact", ColumnKind::rational},
                        {"predicted", ColumnKind::rational},
                        {"residual", ColumnKind::rational}});
  for (const auto& [n, recs] : records) {
    if (recs.empty()) err << "note: k = " << cfg.k << " is not in K_" << n << "; skipped\n";
    for (const auto& r : recs) {
      const auto e = store::decode_eta_residual(r);
      t.add_row({n, e.k, to_string(e.exact), to_string(e.predicted), to_string(e.residual)});
    }
  }
  return {std::move(t), false};
}

json witness_cells(const std::vector<asymptotics::Witness>& items) {
  json out = json::array();
  for (const auto& w : items) out.push_back(to_string(w.subject) + ":" + to_string(w.value));
  return out;
}

Outcome cmd_verify(const CommandConfig& cfg, std::ostream& err) {
  require_positive(cfg.n);
  asymptotics::Claim claim;
  if (cfg.claim == "thm11") {
    claim = asymptotics::Claim::large_mass_form;
  } else if (cfg.claim == "thm12") {
    claim = asymptotics::Claim::unique_mode;
  } else if (cfg.claim == "ineq") {
    claim = asymptotics::Claim::final_inequality;
    if (cfg.n.first < 2) throw UsageError("verify ineq needs n >= 2");
  } else {
    throw UsageError("--claim must be one of thm11, thm12, ineq");
  }
  const auto records = records_for_range(
      cfg, "verify-" + std::string(asymptotics::claim_tag(claim)), RecordKind::verification,
      [&](std::uint64_t n) {
        switch (claim) {
          case asymptotics::Claim::large_mass_form:
            return std::vector{store::encode(asymptotics::verify_large_mass_form(n, cfg.budget))};
          case asymptotics::Claim::final_inequality:
            return std::vector{store::encode(asymptotics::verify_final_inequality(n))};
          default:
            return std::vector{store::encode(asymptotics::verify_unique_mode(n, cfg.budget))};
        }
      },
      err);
  Table t("verify", {{"n", ColumnKind::integer},
                     {"claim", ColumnKind::text},
                     {"verdict", ColumnKind::text},
                     {"witnesses", ColumnKind::list},
                     {"evidence", ColumnKind::list}});
  bool findings = false;
  for (const auto& [n, recs] : records) {
    for (const auto& r : recs) {
      const auto report = store::decode_verification(r);
      findings = findings || !report.holds();
      t.add_row({n, std::string(asymptotics::claim_tag(report.claim)), report.holds() ? "holds" : "fails",
                 witness_cells(report.witnesses), witness_cells(report.evidence)});
    }
  }
  return {std::move(t), findings};
}

Outcome cmd_scan(const CommandConfig& cfg, std::ostream& err) {
  require_positive(cfg.n);
  const auto records = records_for_range(
      cfg, "verify-thm_1_2_mode", RecordKind::verification,
      [&](std::uint64_t n) { return std::vector{store::encode(asymptotics::verify_unique_mode(n, cfg.budget))}; },
      err);
  Table t("scan-counterexamples", {{"n", ColumnKind::integer},
                                   {"max_k", ColumnKind::integer},
                                   {"predicted", ColumnKind::integer},
                                   {"argmax", ColumnKind::list},
                                   {"M", ColumnKind::rational},
                                   {"verdict", ColumnKind::text}});
  std::vector<std::uint64_t> counterexamples;
  for (const auto& [n, recs] : records) {
    for (const auto& r : recs) {
      const auto report = store::decode_verification(r);
      const auto kn = numtheory::compute_kn(n);
      const auto& source = report.holds() ? report.evidence : report.witnesses;
      std::vector<Natural> argmax;
      if (report.holds()) {
        argmax.push_back(source.front().subject);
      } else {
        for (const auto& w : source) argmax.push_back(w.subject);
      }
      if (!report.holds()) counterexamples.push_back(n);
      t.add_row({n, kn.max_k, n - kn.max_k, natural_list(argmax), to_string(source.front().value),
                 report.holds() ? "holds" : "fails"});
    }
  }
  err << "counterexamples: " << counterexamples.size();
  for (std::size_t i = 0; i < counterexamples.size(); ++i) err << (i ? "," : " ") << counterexamples[i];
  err << '\n';
  return {std::move(t), !counterexamples.empty()};
}

Outcome cmd_tail_max(const CommandConfig& cfg) {
  require_positive(cfg.n);
  if (!cfg.eps) throw UsageError("tail-max needs --eps");
  Rational eps;
  try {
    eps = parse_exact_rational(*cfg.eps);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--eps: ") + e.what());
  }
  if (sgn(eps) <= 0) throw UsageError("--eps must be positive");
  Table t("tail-max", {{"n", ColumnKind::integer},
                       {"eps", ColumnKind::rational},
                       {"m", ColumnKind::big},
                       {"p", ColumnKind::rational}});
  for (std::uint64_t n : range_values(cfg.n)) {
    const auto best = exactdist::tail_max(n, eps, cfg.budget);
    if (best) {
      t.add_row({n, to_string(eps), to_string(best->m), to_string(best->probability)});
    } else {
      t.add_row({n, to_string(eps), nullptr, nullptr});
    }
  }
  return {std::move(t), false};
}

Outcome cmd_sample(const CommandConfig& cfg, std::ostream& err) {
  require_positive(cfg.n);
  if (cfg.trials == 0) throw UsageError("--trials must be >= 1");
  const std::uint64_t seed = cfg.seed ? *cfg.seed : std::random_device{}() * 0x100000001ULL ^ std::random_device{}();
  err << "seed: " << seed << '\n';
  Table t("sample", {{"n", ColumnKind::integer},
                     {"target", ColumnKind::text},
                     {"trials", ColumnKind::integer},
                     {"hits", ColumnKind::integer},
                     {"estimate", ColumnKind::real},
                     {"std_err", ColumnKind::real},
                     {"seed", ColumnKind::big}});
  std::optional<Natural> m;
  if (cfg.target == "p") {
    if (!cfg.m) throw UsageError("sample --target p needs --m");
    try {
      m = parse_natural(*cfg.m);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--m: ") + e.what());
    }
  } else if (cfg.target != "collision") {
    throw UsageError("--target must be p or collision");
  }
  const sampler::RunOptions options{cfg.trials, seed, cfg.threads};
  for (std::uint64_t n : range_values(cfg.n)) {
    const auto e = m ? sampler::estimate_p(n, *m, options) : sampler::estimate_collision(n, options);
    t.add_row({n, e.target, e.trials, e.hits, e.estimate, e.std_err, std::to_string(e.seed)});
  }
  return {std::move(t), false};
}

Outcome cmd_bounds_check(const CommandConfig& cfg) {
  require_positive(cfg.n);
  if (cfg.n.last > 8) throw UsageError("bounds-check enumerates S_n and is limited to n <= 8");
  Table t("bounds-check", {{"n", ColumnKind::integer},
                           {"comparisons", ColumnKind::integer},
                           {"violations", ColumnKind::list},
                           {"verdict", ColumnKind::text}});
  bool findings = false;
  for (std::uint64_t n : range_values(cfg.n)) {
    const auto summary = asymptotics::check_bounds_exhaustive(n);
    json violations = json::array();
    for (const auto& v : summary.violations) {
      violations.push_back(v.bound + ":" + v.subject + ":c=" + std::to_string(v.cycles) + ":" +
                           to_string(v.probability) + ">" + to_string(v.bound_value));
    }
    findings = findings || !summary.holds();
    t.add_row({n, summary.comparisons, violations, summary.holds() ? "holds" : "fails"});
  }
  return {std::move(t), findings};
}

void add_common(CLI::App* sub, CommandConfig& cfg, std::string& n_text, std::string& format_text) {
  sub->add_option("--n", n_text, "n or inclusive range a..b")->required();
  sub->add_option("--format", format_text, "table | csv | json")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  sub->add_option("--cache-dir", cfg.cache_dir,
                  std::string("result store directory (default: $") + kCacheDirEnv + ")");
  sub->add_option("--max-n", cfg.budget.max_n, "largest n for whole-distribution work")->capture_default_str();
  sub->add_option("--max-support", cfg.budget.max_support, "largest support size to enumerate")
      ->capture_default_str();
}

}  // namespace

int run(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Outcome outcome = [&]() -> Outcome {
      const auto& s = cfg.subcommand;
      if (s == "kn") return cmd_kn(cfg);
      if (s == "landau") return cmd_landau(cfg);
      if (s == "pmf") return cmd_pmf(cfg);
      if (s == "mode") return cmd_mode(cfg, err);
      if (s == "collision") return cmd_collision(cfg);
      if (s == "eta-check") return cmd_eta_check(cfg, err);
      if (s == "verify") return cmd_verify(cfg, err);
      if (s == "scan-counterexamples") return cmd_scan(cfg, err);
      if (s == "tail-max") return cmd_tail_max(cfg);
      if (s == "sample") return cmd_sample(cfg, err);
      if (s == "bounds-check") return cmd_bounds_check(cfg);
      throw UsageError("unknown subcommand '" + s + "'");
    }();
    outcome.table.render(out, cfg.format);
    return outcome.findings ? kExitFindings : kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    err << "resource error: " << e.what() << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and Monte Carlo computations on the order of a uniform random permutation"};
  app.require_subcommand(1);
  CommandConfig cfg;
  std::string n_text;
  std::string format_text = "table";

  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec specs[] = {
      {"kn", "K_n = {k < n : lcm(1..k) | n-k}"},
      {"landau", "Landau's function g(n)"},
      {"pmf", "exact distribution of the order"},
      {"mode", "exact mode and M(n)"},
      {"collision", "exact probability that two permutations have equal order"},
      {"eta-check", "residual of p_n(n-k) against 1/(n-k) + eta(n,k)"},
      {"verify", "check a structural claim over a range of n"},
      {"tail-max", "largest p_n(m) over m >= n^(1+eps)"},
      {"sample", "Monte Carlo estimates via the Feller coupling"},
      {"bounds-check", "exhaustive small-n dominance of the cycle-count bounds"},
      {"scan-counterexamples", "every n whose mode is not n - max K_n"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    add_common(sub, cfg, n_text, format_text);
    subs[spec.name] = sub;
  }
  subs["eta-check"]->add_option("--k", cfg.k, "0, max, or a member of K_n")->capture_default_str();
  subs["verify"]->add_option("--claim", cfg.claim, "thm11 | thm12 | ineq")->capture_default_str();
  subs["tail-max"]->add_option("--eps", cfg.eps, "positive exponent, e.g. 0.3 or 3/10")->required();
  auto* sample = subs["sample"];
  sample->add_option("--target", cfg.target, "p | collision")->capture_default_str();
  sample->add_option("--m", cfg.m, "order m for --target p");
  sample->add_option("--trials", cfg.trials, "number of trials")->capture_default_str();
  sample->add_option("--seed", cfg.seed, "master seed (echoed when chosen at random)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // Subcommand-level help also lands here.
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cfg.subcommand = name;
  }
  try {
    cfg.n = parse_range(n_text);
    cfg.format = parse_format(format_text);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!cfg.cache_dir) {
    if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') cfg.cache_dir = env;
  }
  if (cfg.threads == 0) cfg.threads = 1;
  return run(cfg, out, err);
}

}  // namespace permorder::cli
