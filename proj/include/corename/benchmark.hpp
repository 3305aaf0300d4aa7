#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "corename/feedback.hpp"
#include "corename/orchestrator.hpp"
#include "corename/reasoner.hpp"

namespace corename {

struct GoldSet {
  std::string id;
  std::string fixture;  // project dir, relative to the gold file's directory
  std::vector<RenameRefactoring> renames;
  /// Guards that separate gold from non-gold in this fixture (optional).
  std::vector<Guard> aligned_guards;
  std::string source_path;  // where it was loaded from
};

void to_json(json& j, const GoldSet& g);
void from_json(const json& j, GoldSet& g);
GoldSet load_gold(const std::string& path);
/// Resolved project directory of a gold set.
std::string fixture_dir(const GoldSet& g);

/// Highest-priority kind (class > field > method > parameter > local), ties by (file, line).
RenameRefactoring select_seed(const GoldSet& gold);
/// Gold without the seed.
GoldSet updated_gold(const GoldSet& gold, const RenameRefactoring& seed);

/// Exact non-negative fraction in lowest terms; 0/0 is represented as 0/1.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t n, std::int64_t d);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct SessionMetrics {
  std::int64_t tp = 0, fp = 0, fn = 0;
  Rational precision, recall, f1;
};

void to_json(json& j, const SessionMetrics& m);
SessionMetrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn);

/// Identity used for gold matching: override-group representative plus new name.
struct GoldKey {
  std::uint32_t decl = 0;
  std::string new_name;
  friend auto operator<=>(const GoldKey&, const GoldKey&) = default;
};

/// Resolves gold renames against the initial model. Throws SeedUnresolvable
/// for entries that do not name a declaration.
std::set<GoldKey> resolve_gold(const CodeModel& model, const std::vector<RenameRefactoring>& renames);

/// TP = |applied ∩ gold|, FP = |applied ∖ gold|, FN = |gold ∖ applied|.
SessionMetrics score(const std::set<GoldKey>& applied, const std::set<GoldKey>& gold);
/// Session scoring: FP counts offered suggestions outside the gold set, so
/// precision is the fraction of offers that were correct.
SessionMetrics score(const std::set<GoldKey>& applied, const std::set<GoldKey>& offered, const std::set<GoldKey>& gold);

/// Applied (excluding the seed) and offered keys of a finished session.
std::set<GoldKey> applied_keys(const SessionResult& r);
std::set<GoldKey> offered_keys(const SessionResult& r);

/// Simulated developer: accepts iff the item matches a gold entry. Reveals nothing else.
class OracleFeedback : public FeedbackSource {
 public:
  explicit OracleFeedback(std::set<GoldKey> gold) : gold_(std::move(gold)) {}
  std::string name() const override { return "oracle"; }
  std::vector<bool> review(const ReviewBatch& batch) override;
  int queries() const { return queries_; }

 private:
  std::set<GoldKey> gold_;
  int queries_ = 0;
};

struct BenchConfig {
  SessionConfig session;
  bool use_aligned_guards = false;
  /// Builds a fresh reasoner per session; deterministic when empty.
  std::function<std::unique_ptr<Reasoner>()> make_reasoner;
};

struct BenchRow {
  std::string id;
  std::string fixture;
  RenameRefactoring seed;
  std::size_t gold_size = 0;  // after removing the seed
  SessionMetrics metrics;
  Rational acceptance_rate;  // accepted / offered
  Rational applied_precision;  // |applied ∩ gold| / |applied|
  Counters counters;
  std::string status;
  std::string event_log;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  SessionMetrics aggregate;  // micro-averaged over rows
};

void to_json(json& j, const BenchReport& r);
std::string format_table(const BenchReport& r);

BenchRow run_gold_set(const GoldSet& gold, const BenchConfig& config);
/// Runs every *.json gold set in `suite_dir`, sorted by file name.
BenchReport run_benchmark(const std::string& suite_dir, const BenchConfig& config);

}  // namespace corename
