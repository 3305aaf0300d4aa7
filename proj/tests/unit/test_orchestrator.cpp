#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "corename/benchmark.hpp"
#include "corename/orchestrator.hpp"
#include "support/safety.hpp"
#include "support/scenarios.hpp"

using namespace corename;
namespace fs = std::filesystem;

namespace {

GoldSet flink_gold() { return load_gold(std::string(CORENAME_FIXTURES) + "/suite/flink_port.json"); }

/// Oracle-driven flink_port session, without aligned guards so rejections occur.
SessionResult flink_session(SessionConfig cfg = {}) {
  GoldSet gold = flink_gold();
  CodeModel m = parse_project(fixture_dir(gold));
  RenameRefactoring seed = select_seed(gold);
  OracleFeedback fb(resolve_gold(m, updated_gold(gold, seed).renames));
  DeterministicReasoner r;
  Session s(std::move(m), seed, cfg, r, fb);
  return s.run();
}

bool has_violation(std::vector<SessionEvent> events, const std::string& fragment) {
  for (std::size_t i = 0; i < events.size(); ++i) events[i].seq = static_cast<int>(i) + 1;
  for (const LogViolation& v : validate_event_log(events))
    if (v.message.find(fragment) != std::string::npos) return true;
  return false;
}

std::size_t first_of(const std::vector<SessionEvent>& events, const std::string& type) {
  for (std::size_t i = 0; i < events.size(); ++i)
    if (events[i].type == type) return i;
  throw std::runtime_error("no event " + type);
}

}  // namespace

TEST(Orchestrator, FlinkLogConformsAndRefines) {
  SessionResult r = flink_session();
  EXPECT_EQ(r.status, "completed");
  auto violations = validate_event_log(r.events);
  EXPECT_TRUE(violations.empty()) << violations.front().message;
  EXPECT_GE(r.scopes.size(), 2u);
  EXPECT_GT(r.counters.rejected, 0);
  EXPECT_EQ(r.c_star.applied.front(), select_seed(flink_gold()));
}

TEST(Validator, DetectsOutOfOrderEvents) {
  std::vector<SessionEvent> ok = flink_session().events;

  auto no_refine = ok;
  no_refine.erase(no_refine.begin() + static_cast<long>(first_of(ok, "scope_refined")));
  EXPECT_TRUE(has_violation(no_refine, "rejection without refinement"));

  auto late_scope = ok;
  std::swap(late_scope[first_of(ok, "scope_inferred")], late_scope[first_of(ok, "review_appended")]);
  EXPECT_FALSE(validate_event_log(late_scope).empty());

  auto stray_enqueue = ok;
  SessionEvent extra{0, "file_enqueued", {{"file", "src/Nowhere.mini"}, {"generation", 1}}};
  stray_enqueue.insert(stray_enqueue.begin() + static_cast<long>(first_of(ok, "plan_iteration")), extra);
  EXPECT_TRUE(has_violation(stray_enqueue, "enqueue"));

  auto apply_first = ok;
  std::size_t applied = first_of(ok, "rename_applied");
  std::size_t decided = first_of(ok, "decision_recorded");
  std::rotate(apply_first.begin() + static_cast<long>(decided), apply_first.begin() + static_cast<long>(applied),
              apply_first.begin() + static_cast<long>(applied) + 1);
  EXPECT_TRUE(has_violation(apply_first, "not accepted"));

  auto gap = ok;
  gap.erase(gap.begin() + 3);
  EXPECT_FALSE(validate_event_log(gap).empty());

  auto truncated = ok;
  truncated.pop_back();
  EXPECT_TRUE(has_violation(truncated, "missing session_done"));
}

TEST(Orchestrator, ReplayIsByteIdentical) {
  SessionResult a = flink_session();
  SessionResult b = flink_session();
  EXPECT_EQ(a.event_log, b.event_log);
  EXPECT_FALSE(a.event_log.empty());
}

TEST(Orchestrator, SessionDirHoldsLogs) {
  fs::path dir = fs::temp_directory_path() / "corename_session_dir";
  fs::remove_all(dir);
  SessionConfig cfg;
  cfg.session_dir = dir.string();
  SessionResult r = flink_session(cfg);
  auto loaded = EventLog::load((dir / "events.jsonl").string());
  ASSERT_EQ(loaded.size(), r.events.size());
  std::ifstream in(dir / "events.jsonl", std::ios::binary);
  std::string disk((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(disk, r.event_log);
  EXPECT_EQ(EpisodicMemory::load((dir / "memory.jsonl").string()).size(), r.reviews.size() + r.scopes.size());
  EXPECT_TRUE(fs::exists(dir / "result.json"));
}

TEST(Orchestrator, SingleFileProjectYieldsSeedOnly) {
  CodeModel m = parse_texts(".", {{"A.mini", "class A {\n  private field int count = 0;\n  method int f() {\n    return count;\n  }\n}\n"}});
  RenameRefactoring seed{"A.mini", "count", "total", 2, DeclKind::Field};
  DeterministicReasoner r;
  AutoAcceptFeedback fb;
  Session s(std::move(m), seed, {}, r, fb);
  SessionResult res = s.run();
  ASSERT_EQ(res.c_star.applied.size(), 1u);
  EXPECT_EQ(res.c_star.applied[0], seed);
  EXPECT_EQ(res.visited, (std::vector<std::string>{"A.mini"}));
  EXPECT_TRUE(validate_event_log(res.events).empty());
}

TEST(Orchestrator, PreappliedSeedIsRecordedNotReapplied) {
  CodeModel m = parse_texts(".", {{"A.mini", "class A {\n  private field int totalCount = 0;\n  private field int countLimit = 1;\n}\n"}});
  RenameRefactoring seed{"A.mini", "count", "totalCount", 2, DeclKind::Field};
  SessionConfig cfg;
  cfg.seed_preapplied = true;
  DeterministicReasoner r;
  AutoAcceptFeedback fb;
  Session s(std::move(m), seed, cfg, r, fb);
  SessionResult res = s.run();
  EXPECT_EQ(res.events[1].type, "seed_preapplied");
  EXPECT_EQ(res.final_model->decl(DeclId{1}).name, "totalCount");
  EXPECT_TRUE(validate_event_log(res.events).empty());
}

TEST(Orchestrator, RejectsBadInputs) {
  DeterministicReasoner r;
  AutoAcceptFeedback fb;
  RenameRefactoring missing{"A.mini", "nope", "x", 1, DeclKind::Field};
  CodeModel m = parse_texts(".", {{"A.mini", "class A {\n  field int a;\n}\n"}});
  EXPECT_THROW(Session(m, missing, {}, r, fb).run(), SeedUnresolvable);
  SessionConfig zero;
  zero.K = 0;
  EXPECT_THROW(Session(m, {"A.mini", "a", "b", 2, DeclKind::Field}, zero, r, fb), std::invalid_argument);
  fs::path bad = fs::temp_directory_path() / "corename_bad_project";
  fs::create_directories(bad);
  std::ofstream(bad / "Bad.mini") << "class {";
  EXPECT_THROW(run_session(bad.string(), missing, {}, r, fb), ParseFailure);
}

TEST(Orchestrator, RandomSessionsStaySafe) {
  int sessions = 0;
  for (unsigned i = 0; sessions < 60 && i < 400; ++i) {
    auto sc = scenario::random_scenario(i);
    if (!sc) continue;
    ++sessions;
    std::mt19937 rng(sc->feedback_seed);
    std::bernoulli_distribution coin(sc->accept_p);
    ScriptedFeedback fb([&](const ReviewItem&) { return coin(rng); });
    DeterministicReasoner r;
    SessionConfig cfg;
    cfg.feedback_mode = FeedbackMode::Scripted;
    Session s(sc->model, sc->seed, cfg, r, fb);
    SessionResult res = s.run();
    auto problems = safety::check_closure(sc->model, safety::texts_of(*res.final_model), res.c_star);
    EXPECT_TRUE(problems.empty()) << "scenario " << i << ": " << problems.front();
    EXPECT_TRUE(validate_event_log(res.events).empty()) << "scenario " << i;
  }
  EXPECT_EQ(sessions, 60);
}
