#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "corename/benchmark.hpp"

namespace corename {

namespace fs = std::filesystem;

void to_json(json& j, const GoldSet& g) {
  j = json{{"id", g.id}, {"fixture", g.fixture}, {"renames", g.renames}};
  if (!g.aligned_guards.empty()) j["aligned_guards"] = g.aligned_guards;
}

void from_json(const json& j, GoldSet& g) {
  j.at("id").get_to(g.id);
  j.at("fixture").get_to(g.fixture);
  j.at("renames").get_to(g.renames);
  if (j.contains("aligned_guards")) j["aligned_guards"].get_to(g.aligned_guards);
}

GoldSet load_gold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read gold set " + path);
  GoldSet g = json::parse(in).get<GoldSet>();
  if (g.renames.size() < 2) throw std::runtime_error("gold set " + g.id + " has fewer than 2 renames");
  g.source_path = path;
  return g;
}

std::string fixture_dir(const GoldSet& g) {
  fs::path base = g.source_path.empty() ? fs::path(".") : fs::path(g.source_path).parent_path();
  return (base / g.fixture).lexically_normal().string();
}

RenameRefactoring select_seed(const GoldSet& gold) {
  if (gold.renames.empty()) throw std::invalid_argument("empty gold set");
  return *std::min_element(gold.renames.begin(), gold.renames.end(), [](const auto& a, const auto& b) {
    return std::make_tuple(seed_priority(a.identifier_type), a.file_path, a.line_number) <
           std::make_tuple(seed_priority(b.identifier_type), b.file_path, b.line_number);
  });
}

GoldSet updated_gold(const GoldSet& gold, const RenameRefactoring& seed) {
  GoldSet out = gold;
  auto it = std::find(out.renames.begin(), out.renames.end(), seed);
  if (it != out.renames.end()) out.renames.erase(it);
  return out;
}

Rational Rational::of(std::int64_t n, std::int64_t d) {
  if (d == 0 || n == 0) return {0, 1};
  std::int64_t g = std::gcd(n, d);
  return {n / g, d / g};
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

SessionMetrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  SessionMetrics m{tp, fp, fn, Rational::of(tp, tp + fp), Rational::of(tp, tp + fn), {}};
  // Harmonic mean of P = tp/(tp+fp) and R = tp/(tp+fn) simplifies to 2tp/(2tp+fp+fn).
  m.f1 = Rational::of(2 * tp, 2 * tp + fp + fn);
  return m;
}

void to_json(json& j, const SessionMetrics& m) {
  j = json{{"tp", m.tp},
           {"fp", m.fp},
           {"fn", m.fn},
           {"precision", m.precision.str()},
           {"recall", m.recall.str()},
           {"f1", m.f1.str()},
           {"precision_value", m.precision.value()},
           {"recall_value", m.recall.value()},
           {"f1_value", m.f1.value()}};
}

std::set<GoldKey> resolve_gold(const CodeModel& model, const std::vector<RenameRefactoring>& renames) {
  std::set<GoldKey> out;
  for (const RenameRefactoring& r : renames) {
    auto target = find_target(model, r);
    if (!target) throw SeedUnresolvable("gold rename does not resolve: " + to_string(r));
    out.insert({model.canonical(*target).value, r.new_name});
  }
  return out;
}

namespace {

std::int64_t count_in(const std::set<GoldKey>& a, const std::set<GoldKey>& b) {
  std::int64_t n = 0;
  for (const GoldKey& k : a) n += b.count(k);
  return n;
}

}  // namespace

SessionMetrics score(const std::set<GoldKey>& applied, const std::set<GoldKey>& gold) {
  std::int64_t tp = count_in(applied, gold);
  return metrics_from_counts(tp, static_cast<std::int64_t>(applied.size()) - tp,
                             static_cast<std::int64_t>(gold.size()) - tp);
}

SessionMetrics score(const std::set<GoldKey>& applied, const std::set<GoldKey>& offered, const std::set<GoldKey>& gold) {
  std::int64_t tp = count_in(applied, gold);
  std::int64_t fp = static_cast<std::int64_t>(offered.size()) - count_in(offered, gold);
  return metrics_from_counts(tp, fp, static_cast<std::int64_t>(gold.size()) - tp);
}

std::set<GoldKey> applied_keys(const SessionResult& r) {
  std::set<GoldKey> out;
  for (std::size_t i = 1; i < r.c_star.applied.size(); ++i)
    out.insert({r.final_model->canonical(r.c_star.targets[i]).value, r.c_star.applied[i].new_name});
  return out;
}

std::set<GoldKey> offered_keys(const SessionResult& r) {
  std::set<GoldKey> out;
  for (const ReviewItem& item : r.offered) out.insert({item.canonical_id, item.rename.new_name});
  return out;
}

std::vector<bool> OracleFeedback::review(const ReviewBatch& batch) {
  std::vector<bool> out;
  for (const ReviewItem& item : batch.items) {
    ++queries_;
    out.push_back(gold_.count({item.canonical_id, item.rename.new_name}) > 0);
  }
  return out;
}

BenchRow run_gold_set(const GoldSet& gold, const BenchConfig& config) {
  BenchRow row;
  row.id = gold.id;
  row.fixture = gold.fixture;
  std::string dir = fixture_dir(gold);
  CodeModel model;
  try {
    model = parse_project(dir);
  } catch (const ModelError& e) {
    throw ParseFailure(e.what());
  }
  row.seed = select_seed(gold);
  GoldSet scoring = updated_gold(gold, row.seed);
  row.gold_size = scoring.renames.size();
  std::set<GoldKey> keys = resolve_gold(model, scoring.renames);

  SessionConfig sc = config.session;
  if (config.use_aligned_guards) sc.initial_guards = gold.aligned_guards;
  std::unique_ptr<Reasoner> reasoner =
      config.make_reasoner ? config.make_reasoner() : std::make_unique<DeterministicReasoner>();
  OracleFeedback oracle(keys);
  AutoAcceptFeedback auto_accept;
  FeedbackSource& feedback =
      sc.feedback_mode == FeedbackMode::AutoAccept ? static_cast<FeedbackSource&>(auto_accept) : oracle;

  Session session(std::move(model), row.seed, sc, *reasoner, feedback);
  SessionResult result = session.run();
  auto applied = applied_keys(result);
  auto offered = offered_keys(result);
  row.metrics = score(applied, offered, keys);
  row.acceptance_rate = Rational::of(result.counters.accepted, result.counters.suggestions_offered);
  row.applied_precision = Rational::of(static_cast<std::int64_t>(score(applied, keys).tp),
                                       static_cast<std::int64_t>(applied.size()));
  row.counters = result.counters;
  row.status = result.status;
  row.event_log = result.event_log;
  return row;
}

BenchReport run_benchmark(const std::string& suite_dir, const BenchConfig& config) {
  BenchReport report;
  std::vector<fs::path> files;
  if (fs::is_directory(suite_dir))
    for (const auto& e : fs::directory_iterator(suite_dir))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (const fs::path& f : files) {
    report.rows.push_back(run_gold_set(load_gold(f.string()), config));
    const SessionMetrics& m = report.rows.back().metrics;
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
  }
  report.aggregate = metrics_from_counts(tp, fp, fn);
  return report;
}

void to_json(json& j, const BenchReport& r) {
  json rows = json::array();
  for (const BenchRow& row : r.rows) {
    rows.push_back(json{{"id", row.id},
                        {"fixture", row.fixture},
                        {"seed", row.seed},
                        {"gold_size", row.gold_size},
                        {"metrics", row.metrics},
                        {"acceptance_rate", row.acceptance_rate.str()},
                        {"applied_precision", row.applied_precision.str()},
                        {"counters", row.counters},
                        {"status", row.status}});
  }
  j = json{{"rows", rows}, {"aggregate", r.aggregate}};
}

std::string format_table(const BenchReport& r) {
  std::ostringstream out;
  auto pct = [](const Rational& q) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << 100.0 * q.value() << "%";
    return s.str();
  };
  out << std::left << std::setw(24) << "gold set" << std::right << std::setw(5) << "TP" << std::setw(5) << "FP"
      << std::setw(5) << "FN" << std::setw(10) << "P" << std::setw(10) << "R" << std::setw(10) << "F1"
      << std::setw(10) << "accept" << '\n';
  for (const BenchRow& row : r.rows) {
    out << std::left << std::setw(24) << row.id << std::right << std::setw(5) << row.metrics.tp << std::setw(5)
        << row.metrics.fp << std::setw(5) << row.metrics.fn << std::setw(10) << pct(row.metrics.precision)
        << std::setw(10) << pct(row.metrics.recall) << std::setw(10) << pct(row.metrics.f1) << std::setw(10)
        << pct(row.acceptance_rate) << '\n';
  }
  const SessionMetrics& a = r.aggregate;
  out << std::left << std::setw(24) << "(all)" << std::right << std::setw(5) << a.tp << std::setw(5) << a.fp
      << std::setw(5) << a.fn << std::setw(10) << pct(a.precision) << std::setw(10) << pct(a.recall)
      << std::setw(10) << pct(a.f1) << '\n';
  return out.str();
}

}  // namespace corename
