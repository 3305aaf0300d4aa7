#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>

#include "corename/benchmark.hpp"
#include "oracles/metrics_oracle.hpp"
#include "oracles/reachability.hpp"

using namespace corename;
namespace fs = std::filesystem;

namespace {

std::string suite() { return std::string(CORENAME_FIXTURES) + "/suite"; }

std::set<GoldKey> keys_of(oracle::KeySet bits) {
  std::set<GoldKey> out;
  for (std::uint32_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.insert({i, "n" + std::to_string(i % 3)});
  return out;
}

void expect_matches(const SessionMetrics& got, const oracle::Metrics& want) {
  EXPECT_EQ(got.tp, want.tp);
  EXPECT_EQ(got.fp, want.fp);
  EXPECT_EQ(got.fn, want.fn);
  EXPECT_TRUE(oracle::same_value_lowest_terms(got.precision.num, got.precision.den, want.precision));
  EXPECT_TRUE(oracle::same_value_lowest_terms(got.recall.num, got.recall.den, want.recall));
  EXPECT_TRUE(oracle::same_value_lowest_terms(got.f1.num, got.f1.den, want.f1));
}

}  // namespace

TEST(Metrics, WorkedExample) {
  SessionMetrics m = metrics_from_counts(2, 1, 2);
  EXPECT_EQ(m.precision.str(), "2/3");
  EXPECT_EQ(m.recall.str(), "1/2");
  EXPECT_EQ(m.f1.str(), "4/7");
}

TEST(Metrics, ZeroDenominatorsReadZero) {
  SessionMetrics m = metrics_from_counts(0, 0, 0);
  EXPECT_EQ(m.precision, (Rational{0, 1}));
  EXPECT_EQ(m.recall, (Rational{0, 1}));
  EXPECT_EQ(m.f1, (Rational{0, 1}));
}

TEST(Metrics, MatchSetAlgebraOracleOnRandomPairs) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<unsigned> bits(0, 0xFFFF);
  for (int i = 0; i < 10000; ++i) {
    oracle::KeySet gold(bits(rng)), offered(bits(rng));
    oracle::KeySet applied = offered & oracle::KeySet(bits(rng));
    expect_matches(score(keys_of(applied), keys_of(offered), keys_of(gold)), oracle::metrics(applied, offered, gold));
    expect_matches(score(keys_of(applied), keys_of(gold)), oracle::metrics(applied, applied, gold));
  }
}

TEST(Gold, LoadRejectsTinySetsAndSelectsSeedByPriority) {
  fs::path dir = fs::temp_directory_path() / "corename_gold";
  fs::create_directories(dir);
  std::ofstream(dir / "tiny.json") << R"({"id":"t","fixture":".","renames":[{"file_path":"A.mini","old_name":"a","new_name":"b","line_number":1,"identifier_type":"field"}]})";
  EXPECT_ANY_THROW(load_gold((dir / "tiny.json").string()));

  GoldSet g;
  g.renames = {{"b/B.mini", "x", "y", 3, DeclKind::Method},
               {"a/A.mini", "p", "q", 9, DeclKind::Field},
               {"a/A.mini", "r", "s", 2, DeclKind::Field}};
  EXPECT_EQ(select_seed(g), g.renames[2]);
  GoldSet rest = updated_gold(g, g.renames[2]);
  EXPECT_EQ(rest.renames.size(), 2u);
}

TEST(OracleFeedback, RevealsOnlyTheAcceptBit) {
  OracleFeedback fb({{4, "good"}});
  ReviewBatch batch{"A.mini", 1, {}};
  ReviewItem hit, wrong_name, wrong_decl;
  hit.canonical_id = 4;
  hit.rename.new_name = "good";
  wrong_name.canonical_id = 4;
  wrong_name.rename.new_name = "bad";
  wrong_decl.canonical_id = 5;
  wrong_decl.rename.new_name = "good";
  batch.items = {hit, wrong_name, wrong_decl};
  EXPECT_EQ(fb.review(batch), (std::vector<bool>{true, false, false}));
  EXPECT_EQ(fb.queries(), 3);
}

TEST(Benchmark, FlinkPortRecallEqualsReachabilityWithPerfectPrecision) {
  GoldSet gold = load_gold(suite() + "/flink_port.json");
  BenchConfig cfg;
  cfg.use_aligned_guards = true;
  auto start = std::chrono::steady_clock::now();
  BenchRow row = run_gold_set(gold, cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RenameRefactoring seed = select_seed(gold);
  DeclaredScope scope;
  scope.pattern = extract_pattern(seed.old_name, seed.new_name);
  scope.guards = gold.aligned_guards;
  CodeModel initial = parse_project(fixture_dir(gold));
  oracle::Reachability want =
      oracle::reachability(initial, seed, gold.renames, scope, cfg.session.rounds_cap, cfg.session.K);

  EXPECT_EQ(row.status, "completed");
  EXPECT_EQ(static_cast<std::size_t>(row.metrics.tp + row.metrics.fn), want.gold);
  EXPECT_EQ(static_cast<std::size_t>(row.metrics.tp), want.reachable);
  EXPECT_EQ(row.metrics.precision, (Rational{1, 1}));
  EXPECT_LT(want.reachable, want.gold);  // the legacy package is out of reach
  EXPECT_LE(secs, 30.0);
}

TEST(Benchmark, DecoyAblation) {
  GoldSet gold = load_gold(suite() + "/decoy.json");
  BenchConfig oracle_cfg;
  BenchConfig auto_cfg;
  auto_cfg.session.feedback_mode = FeedbackMode::AutoAccept;
  BenchConfig no_rep;
  no_rep.session.replication = false;
  BenchRow with_oracle = run_gold_set(gold, oracle_cfg);
  BenchRow with_auto = run_gold_set(gold, auto_cfg);
  BenchRow without_replication = run_gold_set(gold, no_rep);
  EXPECT_LT(with_auto.metrics.precision.value(), with_oracle.metrics.precision.value());
  EXPECT_LT(with_auto.applied_precision.value(), with_oracle.applied_precision.value());
  EXPECT_LT(without_replication.metrics.recall.value(), with_oracle.metrics.recall.value());
}

TEST(Benchmark, AggregateIsSumOfRows) {
  BenchReport r = run_benchmark(suite(), {});
  ASSERT_GE(r.rows.size(), 2u);
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const BenchRow& row : r.rows) {
    tp += row.metrics.tp;
    fp += row.metrics.fp;
    fn += row.metrics.fn;
    EXPECT_TRUE(validate_event_log([&] {
                  std::vector<SessionEvent> ev;
                  std::istringstream in(row.event_log);
                  for (std::string line; std::getline(in, line);) ev.push_back(json::parse(line).get<SessionEvent>());
                  return ev;
                }())
                    .empty());
  }
  EXPECT_EQ(r.aggregate.tp, tp);
  EXPECT_EQ(r.aggregate.fp, fp);
  EXPECT_EQ(r.aggregate.fn, fn);
  json j = r;
  EXPECT_EQ(j["rows"].size(), r.rows.size());
  EXPECT_NE(format_table(r).find("flink_port"), std::string::npos);
}

TEST(Benchmark, EmptySuite) {
  fs::path dir = fs::temp_directory_path() / "corename_empty_suite";
  fs::create_directories(dir);
  BenchReport r = run_benchmark(dir.string(), {});
  EXPECT_TRUE(r.rows.empty());
  EXPECT_EQ(r.aggregate.recall, (Rational{0, 1}));
}
