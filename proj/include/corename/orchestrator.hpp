#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "corename/events.hpp"
#include "corename/execution.hpp"
#include "corename/feedback.hpp"
#include "corename/memory.hpp"
#include "corename/reasoner.hpp"
#include "corename/refactor.hpp"
#include "corename/replication.hpp"
#include "corename/scope.hpp"

namespace corename {

class ParseFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SeedUnresolvable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeedbackMode { Interactive, Oracle, AutoAccept, Scripted };
std::string_view to_string(FeedbackMode mode);

struct SessionConfig {
  int K = 50;          // file-plan cap
  int rounds_cap = 3;  // replication rounds
  int per_file_cap = 3;
  int tool_failure_cap = 3;
  FeedbackMode feedback_mode = FeedbackMode::Oracle;
  std::string reasoner_mode = "deterministic";
  bool materialize = false;
  bool replication = true;
  bool seed_preapplied = false;
  /// Structured guards installed on scope@0 in addition to the inferred ones.
  std::vector<Guard> initial_guards;
  /// When set, events.jsonl, memory.jsonl and result.json are written here.
  std::optional<std::string> session_dir;
};

void to_json(json& j, const SessionConfig& c);

struct SessionResult {
  std::string status;  // completed | aborted
  ChangeSet c_star;
  Counters counters;
  std::vector<SessionEvent> events;
  std::string event_log;  // JSONL, byte-comparable across replays
  std::vector<ReviewRecord> reviews;
  std::vector<ReviewItem> offered;
  std::vector<DeclaredScope> scopes;
  std::vector<std::string> visited;  // planned files in order
  std::vector<std::string> warnings;
  bool pattern_inconsistent = false;
  bool reasoner_degraded = false;
  std::optional<std::string> events_path;
  std::shared_ptr<const CodeModel> final_model;
};

void to_json(json& j, const SessionResult& r);

/// One coordinated-rename session over an in-memory project. Live state can be
/// read from other threads while run() executes.
class Session {
 public:
  Session(CodeModel model, RenameRefactoring seed, SessionConfig config, Reasoner& reasoner, FeedbackSource& feedback);
  ~Session();

  /// Throws SeedUnresolvable; FeedbackAborted ends the session with status "aborted".
  SessionResult run();

  const RenameRefactoring& seed() const { return seed_; }
  const SessionConfig& config() const { return config_; }
  std::string status() const;
  Counters counters() const;
  EpisodicMemory& memory() { return *memory_; }
  EventLog& events() { return *events_; }
  ChangeSet changes() const;
  std::string unified_diff() const;
  std::vector<std::string> visited() const;

 private:
  void set_status(std::string s);
  void refine_now();
  void enqueue(const std::string& file, int generation, const std::string& source);

  RenameRefactoring seed_;
  SessionConfig config_;
  Reasoner& reasoner_;
  FeedbackSource& feedback_;
  std::unique_ptr<Workspace> workspace_;
  mutable std::mutex workspace_mu_;
  std::unique_ptr<EpisodicMemory> memory_;
  std::unique_ptr<EventLog> events_;
  mutable std::mutex state_mu_;
  std::string status_ = "created";
  Counters counters_;
  std::set<std::string> offered_fps_;
  std::vector<ReviewItem> offered_items_;
  int next_item_id_ = 1;
  std::vector<std::pair<std::string, int>> queue_;
  std::size_t queue_head_ = 0;
  std::set<std::string> enqueued_;
  std::vector<std::string> visited_;
  std::vector<std::string> warnings_;
  SliceCache slices_;
};

/// Parses `project_root` and runs a session. Throws ParseFailure / SeedUnresolvable.
SessionResult run_session(const std::string& project_root, const RenameRefactoring& seed, const SessionConfig& config,
                          Reasoner& reasoner, FeedbackSource& feedback);

}  // namespace corename
