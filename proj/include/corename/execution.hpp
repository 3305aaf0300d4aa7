#pragma once

#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "corename/events.hpp"
#include "corename/feedback.hpp"
#include "corename/memory.hpp"
#include "corename/reasoner.hpp"
#include "corename/refactor.hpp"

namespace corename {

struct Counters {
  int llm_calls = 0;
  int tool_calls = 0;
  int files_inspected = 0;
  int suggestions_offered = 0;
  int accepted = 0;
  int rejected = 0;
  int actions = 0;  // plan iterations + refinements + discovery passes
};

void to_json(json& j, const Counters& c);

enum class Termination { ReasonerEmpty, IterationCap, AllOffered, ToolFailures, Aborted };
std::string_view to_string(Termination t);

/// Identity of an offered suggestion: (file, line, old_name, new_name, kind).
std::string fingerprint(const RenameRefactoring& r);

struct FilePlanState {
  std::string file;
  int iteration = 0;
  std::set<std::string> offered;
  int tool_failures = 0;
};

struct PlanResult {
  std::vector<RenameRefactoring> applied;  // A_f
  Termination termination = Termination::ReasonerEmpty;
  FilePlanState state;
  bool rejected_any = false;
};

struct ExecutionContext {
  Workspace& workspace;
  std::mutex& workspace_mu;  // held around every workspace access
  EpisodicMemory& memory;
  Reasoner& reasoner;
  FeedbackSource& feedback;
  EventLog& events;
  Counters& counters;
  std::mutex& counters_mu;
  std::set<std::string>& offered;  // session-wide fingerprints
  int& next_item_id;
  std::vector<ReviewItem>& offered_items;
  /// Invoked after a batch containing rejections, once its renames are applied.
  std::function<void()> on_rejection;
  int per_file_cap = 3;
  int tool_failure_cap = 3;

  void bump(int Counters::*field, int n = 1) {
    std::lock_guard lock(counters_mu);
    counters.*field += n;
  }
};

/// Per-file plan loop: find candidates, validate, review, apply accepted renames
/// and comment updates. Throws FeedbackAborted after recording partial work.
PlanResult plan_and_execute(const std::string& file, ExecutionContext& ctx);

/// Review item for a validated rename with ±5 lines of context.
ReviewItem make_review_item(const CodeModel& model, const ValidatedRename& v, int id);

}  // namespace corename
