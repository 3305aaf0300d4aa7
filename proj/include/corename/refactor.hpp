#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corename/model.hpp"
#include "corename/rename.hpp"

namespace corename {

struct TextEdit {
  std::string file;
  int line = 0;
  Span span;  // in the pre-edit text
  std::string replacement;
};

struct CommentEdit {
  std::string file;
  int line = 0;
  std::string before;  // full line text
  std::string after;
};

/// C / ΔC: applied renames in order, each with the model version it produced.
struct ChangeSet {
  std::vector<RenameRefactoring> applied;
  std::vector<DeclId> targets;  // declaration renamed by applied[i]
  std::vector<CommentEdit> comment_edits;
  std::vector<int> model_versions;

  bool empty() const { return applied.empty(); }
  void append(const ChangeSet& delta);
};

struct Violation {
  enum class Kind {
    TargetUnresolved,
    InvalidName,
    Unchanged,
    SiblingCollision,
    Shadowing,
    OverrideConflict,
  };
  Kind kind = Kind::TargetUnresolved;
  std::string file;
  int line = 0;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

struct PreconditionReport {
  std::optional<DeclId> target;
  /// Declarations renamed together: the override group for methods, else just the target.
  std::vector<DeclId> group;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

class PreconditionViolated : public std::runtime_error {
 public:
  explicit PreconditionViolated(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// The rewritten text failed to parse or resolve although preconditions
/// held. Indicates an engine bug; the edit is rolled back.
class InternalReparseFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PreconditionReport check_preconditions(const CodeModel& model, const RenameRefactoring& r);

struct RenameOutcome {
  CodeModel model;
  ChangeSet delta;
  std::vector<TextEdit> edits;
};

/// Renames the declaration (and its override group) plus every code reference.
/// Throws PreconditionViolated.
RenameOutcome apply_rename(const CodeModel& model, const RenameRefactoring& r);

struct CommentOutcome {
  CodeModel model;
  std::vector<CommentEdit> edits;
};

/// Replaces whole-token occurrences of `old_token` inside `//` comments of `file`.
CommentOutcome update_comment(const CodeModel& model, const std::string& file, const std::string& old_token,
                              const std::string& new_token);

/// Edits needed to rename the group in `r`, without checking anything.
std::vector<TextEdit> rename_edits(const CodeModel& model, const std::vector<DeclId>& group,
                                   const std::string& new_name);

/// Texts of the files touched by `edits` after applying them.
std::map<std::string, std::string> apply_edits(const CodeModel& model, const std::vector<TextEdit>& edits);

/// Serialized owner of the evolving project state. Renames and comment updates
/// go through here; with `materialize` every change is written to disk, with
/// file-granular rollback on failure. Otherwise changes stay in memory.
class Workspace {
 public:
  Workspace(CodeModel initial, bool materialize = false);

  const CodeModel& model() const { return model_; }
  const CodeModel& initial() const { return initial_; }
  const ChangeSet& changes() const { return changes_; }
  bool materialize() const { return materialize_; }

  /// Cached per model version; a subsequent apply of the same rename reuses the trial.
  PreconditionReport check(const RenameRefactoring& r);
  /// Throws PreconditionViolated; on a disk failure restores all files and rethrows.
  ChangeSet apply(const RenameRefactoring& r);
  std::vector<CommentEdit> update_comment(const std::string& file, const std::string& old_token,
                                          const std::string& new_token);
  /// Records a rename already present in the text (pre-applied seed).
  void record_preapplied(const RenameRefactoring& r, DeclId target);

  /// Files whose text differs from the initial snapshot.
  std::vector<std::string> changed_files() const;
  /// Unified diff of every changed file against the initial snapshot.
  std::string unified_diff() const;

  int tool_calls() const { return tool_calls_; }

 private:
  struct Trial {
    int version = -1;
    RenameRefactoring r;
    PreconditionReport report;
    std::optional<CodeModel> model;
    std::vector<TextEdit> edits;
    std::map<std::string, std::string> texts;
  };

  Trial& trial(const RenameRefactoring& r);
  void write_files(const std::map<std::string, std::string>& texts);

  CodeModel initial_;
  CodeModel model_;
  ChangeSet changes_;
  bool materialize_;
  std::vector<Trial> trials_;
  int tool_calls_ = 0;
};

}  // namespace corename
