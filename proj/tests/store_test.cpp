#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>

#include "oracles.hpp"
#include "permorder/store.hpp"

namespace permorder::store {
namespace {

namespace fs = std::filesystem;

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("permorder-store-" + std::to_string(rd()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Store make() {
    return Store(dir_, [this](std::string_view msg) { warnings_.emplace_back(msg); });
  }

  static void append_raw(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << text;
  }

  static std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::vector<std::string> warnings_;
};

TEST(Records, KindTags) {
  for (auto k : {RecordKind::pmf_entry, RecordKind::mode, RecordKind::kn, RecordKind::verification,
                 RecordKind::estimate, RecordKind::eta_residual}) {
    EXPECT_EQ(parse_kind(kind_tag(k)), k);
  }
  EXPECT_THROW(parse_kind("bogus"), StoreError);
}

TEST(Records, ModeRoundTrip) {
  const auto m = exactdist::mode(5);
  const auto rec = encode(m);
  const auto line = rec.serialize();
  EXPECT_EQ(line.find('\n'), std::string::npos);
  EXPECT_EQ(ResultRecord::parse(line).serialize(), line);
  const auto back = decode_mode(ResultRecord::parse(line));
  EXPECT_EQ(back.n, 5U);
  EXPECT_EQ(back.argmax, m.argmax);
  EXPECT_EQ(back.max_count, m.max_count);
  EXPECT_EQ(back.max_probability, testing::frac(1, 4));
  EXPECT_NE(line.find("\"1/4\""), std::string::npos);
}

TEST(Records, EveryKindRoundTrips) {
  const auto kn = numtheory::compute_kn(16);
  EXPECT_EQ(decode_kn(ResultRecord::parse(encode(kn).serialize())).members, kn.members);

  const auto report = asymptotics::verify_unique_mode(6);
  const auto rrep = decode_verification(ResultRecord::parse(encode(report).serialize()));
  EXPECT_EQ(rrep.claim, report.claim);
  EXPECT_FALSE(rrep.holds());
  ASSERT_EQ(rrep.witnesses.size(), 1U);
  EXPECT_EQ(rrep.witnesses[0].subject, 6);
  EXPECT_EQ(rrep.witnesses[0].value, testing::frac(1, 3));

  const auto ineq = asymptotics::verify_final_inequality(10);
  const auto rineq = decode_verification(ResultRecord::parse(encode(ineq).serialize()));
  ASSERT_EQ(rineq.inequality_checks.size(), ineq.inequality_checks.size());
  for (std::size_t i = 0; i < ineq.inequality_checks.size(); ++i) {
    EXPECT_EQ(rineq.inequality_checks[i].lhs, ineq.inequality_checks[i].lhs);
    EXPECT_EQ(rineq.inequality_checks[i].rhs, ineq.inequality_checks[i].rhs);
    EXPECT_EQ(rineq.inequality_checks[i].lcm_divides_gap, ineq.inequality_checks[i].lcm_divides_gap);
  }

  const auto est = sampler::make_estimate("p(2)", 3, 100000, 50123, 0xFFFFFFFFFFFFFFFFULL);
  EXPECT_EQ(decode_estimate(ResultRecord::parse(encode(est).serialize())), est);

  const auto eta = asymptotics::eta_residual(12, 2);
  const auto reta = decode_eta_residual(ResultRecord::parse(encode(eta).serialize()));
  EXPECT_EQ(reta.exact, eta.exact);
  EXPECT_EQ(reta.predicted, eta.predicted);
  EXPECT_EQ(reta.residual, eta.residual);

  const auto pmf = exactdist::full_pmf(9);
  EXPECT_EQ(decode_pmf(9, encode(pmf)), pmf);
}

TEST(Records, HugeCountsSurvive) {
  const Natural big = factorial(100);
  const auto rec = encode_pmf_entry(100, numtheory::landau_g(100), big);
  const auto back = ResultRecord::parse(rec.serialize());
  EXPECT_EQ(back.payload.at("count").get<std::string>(), big.get_str());
  EXPECT_EQ(decode_pmf(100, {back}).count(numtheory::landau_g(100)), big);
}

TEST(Records, ParseRejectsBadInput) {
  const auto good = encode(numtheory::compute_kn(3)).serialize();
  EXPECT_THROW(ResultRecord::parse("{}"), StoreError);
  EXPECT_THROW(ResultRecord::parse("not json"), StoreError);
  EXPECT_THROW(ResultRecord::parse(good.substr(0, good.size() - 3)), StoreError);
  // non-canonical: extra whitespace
  EXPECT_THROW(ResultRecord::parse(" " + good), StoreError);
  std::string future = good;
  future.replace(future.find("\"schema_version\":1"), 18, "\"schema_version\":2");
  try {
    ResultRecord::parse(future);
    FAIL() << "expected SchemaMismatch";
  } catch (const SchemaMismatch& e) {
    EXPECT_EQ(e.found(), 2U);
    EXPECT_EQ(e.expected(), kSchemaVersion);
  }
}

TEST_F(StoreTest, EmptyStoreLoadsNothing) {
  auto store = make();
  EXPECT_TRUE(store.load(RecordKind::mode).empty());
  EXPECT_FALSE(store.resume("nothing").has_value());
}

TEST_F(StoreTest, AppendLoadByteIdentical) {
  auto store = make();
  const auto rec = encode(exactdist::mode(5));
  store.append(rec);
  const auto got = store.load(RecordKind::mode, 5, 5);
  ASSERT_EQ(got.size(), 1U);
  EXPECT_EQ(got[0].serialize(), rec.serialize());
  EXPECT_EQ(slurp(store.log_path(RecordKind::mode)), rec.serialize() + "\n");
}

TEST_F(StoreTest, LoadSortsByNAndKeepsWriteOrderForTies) {
  auto store = make();
  for (std::uint64_t n : {7, 3, 5, 3}) {
    auto rec = encode(sampler::make_estimate("p(1)", n, 10, n, warnings_.size()));
    store.append(rec);
  }
  store.append(encode(sampler::make_estimate("tie", 3, 10, 9, 42)));
  const auto got = store.load(RecordKind::estimate);
  ASSERT_EQ(got.size(), 5U);
  std::vector<std::uint64_t> ns;
  for (const auto& r : got) ns.push_back(r.n);
  EXPECT_EQ(ns, (std::vector<std::uint64_t>{3, 3, 3, 5, 7}));
  EXPECT_EQ(decode_estimate(got[2]).target, "tie");
  EXPECT_EQ(store.load(RecordKind::estimate, 4, 6).size(), 1U);
}

TEST_F(StoreTest, TornTailIsDiscardedAndTruncated) {
  auto store = make();
  const auto a = encode(numtheory::compute_kn(4));
  const auto b = encode(numtheory::compute_kn(5));
  store.append(a);
  const auto torn = b.serialize().substr(0, 20);
  append_raw(store.log_path(RecordKind::kn), torn);
  const auto got = store.load(RecordKind::kn);
  ASSERT_EQ(got.size(), 1U);
  EXPECT_EQ(got[0], a);
  EXPECT_EQ(warnings_.size(), 1U);
  EXPECT_EQ(slurp(store.log_path(RecordKind::kn)), a.serialize() + "\n");
  store.append(b);
  EXPECT_EQ(store.load(RecordKind::kn).size(), 2U);
}

TEST_F(StoreTest, AppendAfterTornTailRecovers) {
  auto store = make();
  const auto a = encode(numtheory::compute_kn(4));
  store.append(a);
  append_raw(store.log_path(RecordKind::kn), "{\"kind\":\"kn\",\"n\":");
  store.append(encode(numtheory::compute_kn(6)));
  const auto got = store.load(RecordKind::kn);
  ASSERT_EQ(got.size(), 2U);
  EXPECT_EQ(got[1].n, 6U);
}

TEST_F(StoreTest, CorruptFinalLineIsTruncated) {
  auto store = make();
  store.append(encode(numtheory::compute_kn(4)));
  append_raw(store.log_path(RecordKind::kn), "garbage\n");
  EXPECT_EQ(store.load(RecordKind::kn).size(), 1U);
  EXPECT_EQ(warnings_.size(), 1U);
  EXPECT_EQ(store.load(RecordKind::kn).size(), 1U);
  EXPECT_EQ(warnings_.size(), 1U);
}

TEST_F(StoreTest, CorruptionInsideTheLogIsAnError) {
  auto store = make();
  store.append(encode(numtheory::compute_kn(4)));
  append_raw(store.log_path(RecordKind::kn), "garbage\n");
  append_raw(store.log_path(RecordKind::kn), encode(numtheory::compute_kn(5)).serialize() + "\n");
  EXPECT_THROW(store.load(RecordKind::kn), StoreError);
}

TEST_F(StoreTest, ForeignSchemaIsReported) {
  auto store = make();
  std::string line = encode(numtheory::compute_kn(4)).serialize();
  line.replace(line.find("\"schema_version\":1"), 18, "\"schema_version\":9");
  append_raw(store.log_path(RecordKind::kn), line + "\n");
  EXPECT_THROW(store.load(RecordKind::kn), SchemaMismatch);
}

TEST_F(StoreTest, CheckpointRoundTrip) {
  auto store = make();
  ScanState s{"demo", 2, 9, {2, 3, 7}};
  store.checkpoint(s);
  const auto back = store.resume("demo");
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->first, 2U);
  EXPECT_EQ(back->last, 9U);
  EXPECT_EQ(back->completed, s.completed);
  EXPECT_EQ(back->pending(), (std::vector<std::uint64_t>{4, 5, 6, 8, 9}));
  EXPECT_FALSE(fs::exists(dir_ / "scan-demo.checkpoint.tmp"));
}

TEST_F(StoreTest, ResumeAfterKillRecomputesOnlyUnfinished) {
  std::vector<std::uint64_t> computed;
  std::mutex mu;
  auto compute = [&](std::uint64_t n) {
    {
      std::lock_guard lock(mu);
      computed.push_back(n);
    }
    if (n == 7) throw std::runtime_error("simulated kill");
    return std::vector<ResultRecord>{encode(exactdist::mode(n))};
  };
  {
    auto store = make();
    EXPECT_THROW(run_resumable_scan(store, "mode", 2, 10, 1, compute), std::runtime_error);
  }
  EXPECT_EQ(computed, (std::vector<std::uint64_t>{2, 3, 4, 5, 6, 7}));

  computed.clear();
  auto store = make();
  const auto again = [&](std::uint64_t n) {
    computed.push_back(n);
    return std::vector<ResultRecord>{encode(exactdist::mode(n))};
  };
  EXPECT_EQ(run_resumable_scan(store, "mode", 2, 10, 1, again), 4U);
  EXPECT_EQ(computed, (std::vector<std::uint64_t>{7, 8, 9, 10}));

  const auto got = store.load(RecordKind::mode, 2, 10);
  ASSERT_EQ(got.size(), 9U);
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_EQ(got[i].n, 2 + i);
    EXPECT_EQ(decode_mode(got[i]).argmax, exactdist::mode(2 + i).argmax);
  }

  computed.clear();
  EXPECT_EQ(run_resumable_scan(store, "mode", 2, 10, 1, again), 0U);
  EXPECT_TRUE(computed.empty());
}

TEST_F(StoreTest, ParallelScanAppendsInOrder) {
  auto store = make();
  const auto n = run_resumable_scan(store, "kn", 1, 40, 4, [](std::uint64_t n) {
    return std::vector<ResultRecord>{encode(numtheory::compute_kn(n))};
  });
  EXPECT_EQ(n, 40U);
  std::ifstream in(store.log_path(RecordKind::kn));
  std::string line;
  std::uint64_t expected = 1;
  while (std::getline(in, line)) EXPECT_EQ(ResultRecord::parse(line).n, expected++);
  EXPECT_EQ(expected, 41U);
}

}  // namespace
}  // namespace permorder::store
