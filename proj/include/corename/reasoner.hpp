#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "corename/memory.hpp"
#include "corename/model.hpp"
#include "corename/refactor.hpp"
#include "corename/scope.hpp"

namespace corename {

/// A proposed rename before validation: ⟨identifier_name, identifier_type, new_name, line_number⟩.
struct Suggestion {
  std::string identifier_name;
  DeclKind identifier_type = DeclKind::LocalVariable;
  std::string new_name;
  int line_number = 0;
  std::optional<double> confidence;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

void to_json(json& j, const Suggestion& s);
void from_json(const json& j, Suggestion& s);

class ReasonerUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RefineProposal {
  DeclaredScope scope;
  std::vector<std::string> warnings;
};

/// Every judgment delegated to a model. Implementations must be safe to call
/// from one thread at a time; filter_file may be called from several.
class Reasoner {
 public:
  virtual ~Reasoner() = default;
  virtual std::string name() const = 0;

  /// Raw scope proposal for a seed; checked by infer_from_seed.
  virtual DeclaredScope infer_scope(const RenameRefactoring& seed, const std::string& context) = 0;
  virtual std::vector<Suggestion> find_candidates(const CodeModel& model, const std::string& file,
                                                  const DeclaredScope& scope, const std::vector<Shot>& shots) = 0;
  /// Proposed next scope given every review so far; checked by refine.
  virtual RefineProposal refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) = 0;
  virtual bool filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) = 0;

  int calls() const { return calls_.load(); }

 protected:
  void count_call() { ++calls_; }

 private:
  std::atomic<int> calls_{0};
};

/// Offline reference reasoner driven only by the pattern and structured guards.
class DeterministicReasoner : public Reasoner {
 public:
  std::string name() const override { return "deterministic"; }
  DeclaredScope infer_scope(const RenameRefactoring& seed, const std::string& context) override;
  std::vector<Suggestion> find_candidates(const CodeModel& model, const std::string& file,
                                          const DeclaredScope& scope, const std::vector<Shot>& shots) override;
  RefineProposal refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) override;
  bool filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) override;
};

/// Guard excluding `rejected` but none of `accepted`, trying kind∧visibility,
/// then kind∧exact name, then kind∧exact name∧directory. nullopt when the
/// algebra cannot separate them.
std::optional<std::vector<GuardAtom>> separating_guard(const DeclFacts& rejected,
                                                       const std::vector<DeclFacts>& accepted);

struct ExternalConfig {
  std::string url;    // e.g. http://127.0.0.1:8700/reason
  std::string token;  // sent as a bearer token when non-empty
  std::optional<std::string> transcript_path;
  int timeout_ms = 30000;
};

/// Reads CORENAME_REASONER_URL / CORENAME_REASONER_TOKEN.
ExternalConfig external_config_from_env();

/// Speaks the NDJSON wire protocol. Transport failures throw ReasonerUnavailable;
/// malformed responses are retried once, then treated as empty.
class ExternalReasoner : public Reasoner {
 public:
  explicit ExternalReasoner(ExternalConfig config);
  ~ExternalReasoner() override;
  std::string name() const override { return "external"; }
  DeclaredScope infer_scope(const RenameRefactoring& seed, const std::string& context) override;
  std::vector<Suggestion> find_candidates(const CodeModel& model, const std::string& file,
                                          const DeclaredScope& scope, const std::vector<Shot>& shots) override;
  RefineProposal refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) override;
  bool filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) override;

  int schema_failures() const { return schema_failures_; }

 private:
  /// Posts one request; returns the payload when `valid` accepts it.
  std::optional<json> exchange(const std::string& role, const json& payload,
                               const std::function<bool(const json&)>& valid);

  ExternalConfig config_;
  std::mutex mu_;
  std::optional<std::ofstream> transcript_;
  int schema_failures_ = 0;
};

/// Uses `primary` until it reports ReasonerUnavailable, then `fallback` for
/// the rest of the session. `on_fallback` fires once.
class FallbackReasoner : public Reasoner {
 public:
  FallbackReasoner(std::unique_ptr<Reasoner> primary, std::unique_ptr<Reasoner> fallback,
                   std::function<void(const std::string&)> on_fallback = {});
  std::string name() const override;
  DeclaredScope infer_scope(const RenameRefactoring& seed, const std::string& context) override;
  std::vector<Suggestion> find_candidates(const CodeModel& model, const std::string& file,
                                          const DeclaredScope& scope, const std::vector<Shot>& shots) override;
  RefineProposal refine_guards(const DeclaredScope& scope, const std::vector<ReviewRecord>& reviews) override;
  bool filter_file(const CodeModel& model, const std::string& file, const DeclaredScope& scope) override;

  bool degraded() const { return degraded_.load(); }

 private:
  template <class F>
  auto call(F&& f);

  std::unique_ptr<Reasoner> primary_;
  std::unique_ptr<Reasoner> fallback_;
  std::function<void(const std::string&)> on_fallback_;
  std::atomic<bool> degraded_{false};
  std::mutex mu_;
};

// ─── Validation wrapper ────────────────────────────────────────

enum class DropReason { NotFound, ForeignDeclaration, PreconditionViolation, Duplicate, AlreadyRenamed };
std::string_view to_string(DropReason reason);

struct ValidatedRename {
  RenameRefactoring rename;  // line and kind taken from the model
  DeclId target;
  std::vector<DeclId> group;
  bool pattern_mismatch = false;
  Suggestion source;
};

struct DroppedSuggestion {
  Suggestion suggestion;
  DropReason reason = DropReason::NotFound;
  std::string detail;
};

struct Validation {
  std::vector<ValidatedRename> valid;
  std::vector<DroppedSuggestion> dropped;
};

using PreconditionCheck = std::function<PreconditionReport(const RenameRefactoring&)>;

/// Matches each suggestion to a declaration of `file` and corrects its line and
/// kind. `check` defaults to check_preconditions on `model`.
Validation validate(const std::vector<Suggestion>& suggestions, const CodeModel& model, const std::string& file,
                    const DeclaredScope* scope = nullptr, const PreconditionCheck& check = {});

/// Suggestion mirroring a validated rename (used for idempotence checks).
Suggestion as_suggestion(const ValidatedRename& v);

}  // namespace corename
