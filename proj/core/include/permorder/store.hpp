#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "permorder/asymptotics.hpp"
#include "permorder/exactdist.hpp"
#include "permorder/numtheory.hpp"
#include "permorder/sampler.hpp"

namespace permorder::store {

inline constexpr std::uint64_t kSchemaVersion = 1;

enum class RecordKind { pmf_entry, mode, kn, verification, estimate, eta_residual };

std::string_view kind_tag(RecordKind kind);
RecordKind parse_kind(std::string_view tag);

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaMismatch : public StoreError {
 public:
  SchemaMismatch(std::uint64_t found, std::uint64_t expected);
  std::uint64_t found() const { return found_; }
  std::uint64_t expected() const { return expected_; }

 private:
  std::uint64_t found_;
  std::uint64_t expected_;
};

/// One line of a result log. Integers of unbounded size live in the payload
/// as canonical decimal strings and rationals as "p/q".
struct ResultRecord {
  std::uint64_t schema_version = kSchemaVersion;
  RecordKind kind = RecordKind::mode;
  std::uint64_t n = 0;
  nlohmann::json payload = nlohmann::json::object();

  /// Compact JSON with sorted keys, no trailing newline.
  std::string serialize() const;

  /// Throws SchemaMismatch for a foreign schema version and StoreError for
  /// anything malformed or not in canonical form.
  static ResultRecord parse(std::string_view line);

  friend bool operator==(const ResultRecord& a, const ResultRecord& b) {
    return a.serialize() == b.serialize();
  }
};

ResultRecord encode(const exactdist::ModeResult& mode);
ResultRecord encode(const numtheory::KnRecord& kn);
ResultRecord encode(const asymptotics::VerificationReport& report);
ResultRecord encode(const sampler::EstimateRecord& estimate);
ResultRecord encode(const asymptotics::EtaResidual& residual);
ResultRecord encode_pmf_entry(std::uint64_t n, const Natural& m, const Natural& count);
std::vector<ResultRecord> encode(const exactdist::OrderPmf& pmf);

exactdist::ModeResult decode_mode(const ResultRecord& record);
numtheory::KnRecord decode_kn(const ResultRecord& record);
asymptotics::VerificationReport decode_verification(const ResultRecord& record);
sampler::EstimateRecord decode_estimate(const ResultRecord& record);
asymptotics::EtaResidual decode_eta_residual(const ResultRecord& record);
exactdist::OrderPmf decode_pmf(std::uint64_t n, const std::vector<ResultRecord>& entries);

/// Progress of a resumable scan over an inclusive n-range.
struct ScanState {
  std::string scan_id;
  std::uint64_t first = 0;
  std::uint64_t last = 0;
  std::set<std::uint64_t> completed;

  std::vector<std::uint64_t> pending() const;
};

using WarningSink = std::function<void(std::string_view)>;

/// Append-only, line-delimited result logs, one file per record kind, under
/// a single directory. Single writer, any number of readers.
class Store {
 public:
  /// Creates the directory if needed. Warnings go to stderr unless a sink is given.
  explicit Store(std::filesystem::path directory, WarningSink warn = {});

  const std::filesystem::path& directory() const { return directory_; }
  std::filesystem::path log_path(RecordKind kind) const;

  /// Writes one complete line. A torn tail left by an earlier crash is
  /// truncated away first.
  void append(const ResultRecord& record);

  /// Records of one kind with first <= n <= last, sorted by n; equal n keep
  /// write order. A corrupt or torn final line is reported and truncated.
  std::vector<ResultRecord> load(RecordKind kind, std::uint64_t first = 0,
                                 std::uint64_t last = UINT64_MAX);

  /// Atomically replaces the checkpoint for state.scan_id.
  void checkpoint(const ScanState& state);
  std::optional<ScanState> resume(std::string_view scan_id) const;

 private:
  std::vector<ResultRecord> read_log(RecordKind kind);
  std::filesystem::path checkpoint_path(std::string_view scan_id) const;

  std::filesystem::path directory_;
  WarningSink warn_;
};

/// Brings `scan_id` over [first, last] up to date: restores progress from
/// the store, computes pending n in batches of `threads` (in parallel),
/// appends their records in n order and checkpoints after each batch.
/// Returns how many n were computed in this call.
std::uint64_t run_resumable_scan(Store& store, const std::string& scan_id, std::uint64_t first,
                                 std::uint64_t last, unsigned threads,
                                 const std::function<std::vector<ResultRecord>(std::uint64_t)>& compute);

}  // namespace permorder::store
