#include "permorder/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "permorder/parallel.hpp"

namespace permorder::store {

using nlohmann::json;

namespace {

constexpr RecordKind kAllKinds[] = {RecordKind::pmf_entry, RecordKind::mode,     RecordKind::kn,
                                    RecordKind::verification, RecordKind::estimate,
                                    RecordKind::eta_residual};

std::string natural_field(const json& payload, const char* key) {
  return payload.at(key).get<std::string>();
}

Natural natural_at(const json& payload, const char* key) { return parse_natural(natural_field(payload, key)); }
Rational rational_at(const json& payload, const char* key) {
  return parse_rational(payload.at(key).get<std::string>());
}

json witnesses_to_json(const std::vector<asymptotics::Witness>& items) {
  json out = json::array();
  for (const auto& w : items) out.push_back({{"subject", to_string(w.subject)}, {"value", to_string(w.value)}});
  return out;
}

std::vector<asymptotics::Witness> witnesses_from_json(const json& items) {
  std::vector<asymptotics::Witness> out;
  for (const auto& w : items) out.push_back({natural_at(w, "subject"), rational_at(w, "value")});
  return out;
}

void expect_kind(const ResultRecord& record, RecordKind kind) {
  if (record.kind != kind) {
    throw StoreError("expected a " + std::string(kind_tag(kind)) + " record, got " +
                     std::string(kind_tag(record.kind)));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
  while (!data.empty()) {
    const ssize_t written = ::write(fd, data.data(), data.size());
    if (written < 0) {
      if (errno == EINTR) continue;
      throw StoreError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    data.remove_prefix(static_cast<std::size_t>(written));
  }
}

}  // namespace

std::string_view kind_tag(RecordKind kind) {
  switch (kind) {
    case RecordKind::pmf_entry: return "pmf_entry";
    case RecordKind::mode: return "mode";
    case RecordKind::kn: return "kn";
    case RecordKind::verification: return "verification";
    case RecordKind::estimate: return "estimate";
    case RecordKind::eta_residual: return "eta_residual";
  }
  return "unknown";
}

RecordKind parse_kind(std::string_view tag) {
  for (RecordKind k : kAllKinds) {
    if (kind_tag(k) == tag) return k;
  }
  throw StoreError("unknown record kind '" + std::string(tag) + "'");
}

SchemaMismatch::SchemaMismatch(std::uint64_t found, std::uint64_t expected)
    : StoreError("record schema version " + std::to_string(found) + " is not supported (expected " +
                 std::to_string(expected) + ")"),
      found_(found),
      expected_(expected) {}

std::string ResultRecord::serialize() const {
  json j = {{"schema_version", schema_version},
            {"kind", std::string(kind_tag(kind))},
            {"n", n},
            {"payload", payload}};
  return j.dump();
}

ResultRecord ResultRecord::parse(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw StoreError("record is not a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_unsigned()) {
    throw StoreError("record lacks schema_version");
  }
  const auto version = j["schema_version"].get<std::uint64_t>();
  if (version != kSchemaVersion) throw SchemaMismatch(version, kSchemaVersion);
  if (j.size() != 4 || !j.contains("kind") || !j["kind"].is_string() || !j.contains("n") ||
      !j["n"].is_number_unsigned() || !j.contains("payload") || !j["payload"].is_object()) {
    throw StoreError("record fields malformed");
  }
  ResultRecord out;
  out.schema_version = version;
  out.kind = parse_kind(j["kind"].get<std::string>());
  out.n = j["n"].get<std::uint64_t>();
  out.payload = std::move(j["payload"]);
  if (out.serialize() != line) throw StoreError("record is not in canonical form");
  return out;
}

ResultRecord encode(const exactdist::ModeResult& mode) {
  json argmax = json::array();
  for (const auto& m : mode.argmax) argmax.push_back(to_string(m));
  return {kSchemaVersion, RecordKind::mode, mode.n,
          {{"argmax", argmax}, {"max_count", to_string(mode.max_count)},
           {"M", to_string(mode.max_probability)}}};
}

ResultRecord encode(const numtheory::KnRecord& kn) {
  return {kSchemaVersion, RecordKind::kn, kn.n, {{"members", kn.members}, {"max_k", kn.max_k}}};
}

ResultRecord encode(const asymptotics::VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.inequality_checks) {
    checks.push_back({{"k", c.k},
                      {"lhs", to_string(c.lhs)},
                      {"rhs", to_string(c.rhs)},
                      {"lcm_divides_gap", c.lcm_divides_gap}});
  }
  return {kSchemaVersion, RecordKind::verification, report.n,
          {{"claim", std::string(asymptotics::claim_tag(report.claim))},
           {"verdict", report.holds() ? "holds" : "fails"},
           {"witnesses", witnesses_to_json(report.witnesses)},
           {"evidence", witnesses_to_json(report.evidence)},
           {"inequality_checks", checks}}};
}

ResultRecord encode(const sampler::EstimateRecord& e) {
  return {kSchemaVersion, RecordKind::estimate, e.n,
          {{"target", e.target},
           {"trials", std::to_string(e.trials)},
           {"hits", std::to_string(e.hits)},
           {"estimate", e.estimate},
           {"std_err", e.std_err},
           {"seed", std::to_string(e.seed)}}};
}

ResultRecord encode(const asymptotics::EtaResidual& r) {
  return {kSchemaVersion, RecordKind::eta_residual, r.n,
          {{"k", r.k},
           {"exact", to_string(r.exact)},
           {"predicted", to_string(r.predicted)},
           {"residual", to_string(r.residual)}}};
}

ResultRecord encode_pmf_entry(std::uint64_t n, const Natural& m, const Natural& count) {
  return {kSchemaVersion, RecordKind::pmf_entry, n, {{"m", to_string(m)}, {"count", to_string(count)}}};
}

std::vector<ResultRecord> encode(const exactdist::OrderPmf& pmf) {
  std::vector<ResultRecord> out;
  for (const auto& [m, c] : pmf.entries) out.push_back(encode_pmf_entry(pmf.n, m, c));
  return out;
}

exactdist::ModeResult decode_mode(const ResultRecord& record) {
  expect_kind(record, RecordKind::mode);
  exactdist::ModeResult out;
  out.n = record.n;
  for (const auto& m : record.payload.at("argmax")) out.argmax.push_back(parse_natural(m.get<std::string>()));
  out.max_count = natural_at(record.payload, "max_count");
  out.max_probability = rational_at(record.payload, "M");
  return out;
}

numtheory::KnRecord decode_kn(const ResultRecord& record) {
  expect_kind(record, RecordKind::kn);
  return {record.n, record.payload.at("members").get<std::vector<std::uint64_t>>(),
          record.payload.at("max_k").get<std::uint64_t>()};
}

asymptotics::VerificationReport decode_verification(const ResultRecord& record) {
  expect_kind(record, RecordKind::verification);
  asymptotics::VerificationReport out;
  out.n = record.n;
  out.claim = asymptotics::parse_claim_tag(record.payload.at("claim").get<std::string>());
  out.witnesses = witnesses_from_json(record.payload.at("witnesses"));
  out.evidence = witnesses_from_json(record.payload.at("evidence"));
  for (const auto& c : record.payload.at("inequality_checks")) {
    out.inequality_checks.push_back({c.at("k").get<std::uint64_t>(), rational_at(c, "lhs"),
                                     rational_at(c, "rhs"), c.at("lcm_divides_gap").get<bool>()});
  }
  const bool verdict = record.payload.at("verdict").get<std::string>() == "holds";
  if (verdict != out.holds()) throw StoreError("verification verdict disagrees with its witnesses");
  return out;
}

sampler::EstimateRecord decode_estimate(const ResultRecord& record) {
  expect_kind(record, RecordKind::estimate);
  const auto& p = record.payload;
  return {p.at("target").get<std::string>(),
          record.n,
          std::stoull(natural_field(p, "trials")),
          std::stoull(natural_field(p, "hits")),
          p.at("estimate").get<double>(),
          p.at("std_err").get<double>(),
          std::stoull(natural_field(p, "seed"))};
}

asymptotics::EtaResidual decode_eta_residual(const ResultRecord& record) {
  expect_kind(record, RecordKind::eta_residual);
  const auto& p = record.payload;
  return {record.n, p.at("k").get<std::uint64_t>(), rational_at(p, "exact"), rational_at(p, "predicted"),
          rational_at(p, "residual")};
}

exactdist::OrderPmf decode_pmf(std::uint64_t n, const std::vector<ResultRecord>& entries) {
  exactdist::OrderPmf out{n, {}};
  for (const auto& r : entries) {
    expect_kind(r, RecordKind::pmf_entry);
    if (r.n != n) continue;
    out.entries[natural_at(r.payload, "m")] = natural_at(r.payload, "count");
  }
  return out;
}

std::vector<std::uint64_t> ScanState::pending() const {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = first; n <= last; ++n) {
    if (completed.count(n) == 0) out.push_back(n);
    if (n == UINT64_MAX) break;
  }
  return out;
}

Store::Store(std::filesystem::path directory, WarningSink warn)
    : directory_(std::move(directory)), warn_(std::move(warn)) {
  if (!warn_) {
    warn_ = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  }
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw StoreError("cannot create store directory " + directory_.string() + ": " + ec.message());
}

std::filesystem::path Store::log_path(RecordKind kind) const {
  return directory_ / (std::string(kind_tag(kind)) + ".log");
}

std::filesystem::path Store::checkpoint_path(std::string_view scan_id) const {
  return directory_ / ("scan-" + std::string(scan_id) + ".checkpoint");
}

std::vector<ResultRecord> Store::read_log(RecordKind kind) {
  const auto path = log_path(kind);
  const std::string content = read_file(path);
  std::vector<ResultRecord> records;
  std::size_t valid_end = 0;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    const std::size_t newline = content.find('\n', pos);
    ++line_no;
    if (newline == std::string::npos) {
      warn_(path.string() + ": torn record at line " + std::to_string(line_no) + " discarded");
      break;
    }
    const std::string_view line(content.data() + pos, newline - pos);
    try {
      ResultRecord r = ResultRecord::parse(line);
      if (r.kind != kind) throw StoreError("record of kind " + std::string(kind_tag(r.kind)) + " in wrong log");
      records.push_back(std::move(r));
      valid_end = newline + 1;
    } catch (const SchemaMismatch&) {
      throw;
    } catch (const std::exception& e) {
      if (newline + 1 != content.size()) {
        throw StoreError(path.string() + ": corrupt record at line " + std::to_string(line_no) + ": " + e.what());
      }
      warn_(path.string() + ": corrupt final record at line " + std::to_string(line_no) + " discarded (" +
            e.what() + ")");
      break;
    }
    pos = newline + 1;
  }
  if (valid_end != content.size()) std::filesystem::resize_file(path, valid_end);
  return records;
}

void Store::append(const ResultRecord& record) {
  const auto path = log_path(record.kind);
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (!ec && size > 0) {
    std::ifstream in(path, std::ios::binary);
    in.seekg(static_cast<std::streamoff>(size) - 1);
    if (in.get() != '\n') read_log(record.kind);
  }
  const std::string line = record.serialize() + "\n";
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) throw StoreError("cannot open " + path.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, line, path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

std::vector<ResultRecord> Store::load(RecordKind kind, std::uint64_t first, std::uint64_t last) {
  std::vector<ResultRecord> out;
  for (auto& r : read_log(kind)) {
    if (r.n >= first && r.n <= last) out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const ResultRecord& a, const ResultRecord& b) { return a.n < b.n; });
  return out;
}

void Store::checkpoint(const ScanState& state) {
  json j = {{"schema_version", kSchemaVersion},
            {"scan_id", state.scan_id},
            {"first", state.first},
            {"last", state.last},
            {"completed", state.completed}};
  const auto path = checkpoint_path(state.scan_id);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << j.dump() << '\n';
    if (!out.flush()) throw StoreError("cannot write checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<ScanState> Store::resume(std::string_view scan_id) const {
  const std::string content = read_file(checkpoint_path(scan_id));
  if (content.empty()) return std::nullopt;
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw StoreError("checkpoint for " + std::string(scan_id) + " is corrupt");
  const auto version = j.at("schema_version").get<std::uint64_t>();
  if (version != kSchemaVersion) throw SchemaMismatch(version, kSchemaVersion);
  return ScanState{j.at("scan_id").get<std::string>(), j.at("first").get<std::uint64_t>(),
                   j.at("last").get<std::uint64_t>(), j.at("completed").get<std::set<std::uint64_t>>()};
}

std::uint64_t run_resumable_scan(Store& store, const std::string& scan_id, std::uint64_t first,
                                 std::uint64_t last, unsigned threads,
                                 const std::function<std::vector<ResultRecord>(std::uint64_t)>& compute) {
  ScanState state{scan_id, first, last, {}};
  if (auto previous = store.resume(scan_id)) state.completed = std::move(previous->completed);
  const auto pending = state.pending();
  const std::size_t batch = std::max(threads, 1u);
  for (std::size_t start = 0; start < pending.size(); start += batch) {
    const std::size_t count = std::min(batch, pending.size() - start);
    std::vector<std::vector<ResultRecord>> results(count);
    parallel_for(count, threads, [&](std::size_t i) { results[i] = compute(pending[start + i]); });
    for (std::size_t i = 0; i < count; ++i) {
      for (const auto& r : results[i]) store.append(r);
      state.completed.insert(pending[start + i]);
    }
    store.checkpoint(state);
  }
  return pending.size();
}

}  // namespace permorder::store
