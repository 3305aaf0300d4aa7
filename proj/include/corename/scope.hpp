#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corename/model.hpp"
#include "corename/rename.hpp"

namespace corename {

// ─── Name pattern ──────────────────────────────────────────────
// f: old ↦ new over identifier words. Matching is case-insensitive and
// tolerant to one plural 's'; emitted words take the casing (and number)
// of the words they replace.

struct NamePattern {
  std::vector<std::string> old_fragment;  // lower-case words
  std::vector<std::string> new_fragment;  // lower-case words
  /// Whole-name literal mapping used when no word-level pattern
  /// reproduces the seed (e.g. irregular casing). Both set or neither.
  std::optional<std::string> verbatim_old;
  std::optional<std::string> verbatim_new;

  bool valid() const;
  std::string display() const;  // "joinHints -> queryHints"
  friend bool operator==(const NamePattern&, const NamePattern&) = default;
};

NamePattern make_pattern(std::string_view old_text, std::string_view new_text);

/// New name for `name`, or nullopt when the pattern does not occur.
std::optional<std::string> apply_pattern(const NamePattern& p, std::string_view name);

/// Deterministic pattern extraction from a seed (common-affix with one
/// word of right context). Always round-trips: apply(result, old) == new.
NamePattern extract_pattern(std::string_view old_name, std::string_view new_name);

// ─── Guards ────────────────────────────────────────────────────

/// One predicate of a structured guard. A guard excludes a declaration
/// when all of its atoms hold.
struct GuardAtom {
  enum class Kind { ExcludeKind, ExcludeVisibility, ExcludeNameRegex, RestrictDir };
  Kind kind = Kind::ExcludeKind;
  DeclKind decl_kind = DeclKind::Method;
  Visibility visibility = Visibility::Public;
  std::string text;  // regex or dir prefix

  bool holds(const DeclFacts& d) const;
  friend bool operator==(const GuardAtom&, const GuardAtom&) = default;
};

struct Guard {
  int id = 0;
  std::string description;
  std::optional<std::vector<GuardAtom>> structured;  // absent: advisory, natural language only

  bool advisory() const { return !structured.has_value(); }
  bool excludes(const DeclFacts& d) const;
  friend bool operator==(const Guard&, const Guard&) = default;
};

/// Renders a description for a structured conjunction.
std::string describe_atoms(const std::vector<GuardAtom>& atoms);

struct DeclaredScope {
  NamePattern pattern;
  std::vector<Guard> guards;
  std::string rationale;
  int revision = 0;
  std::optional<int> parent_revision;

  /// True when every structured guard lets `d` through.
  bool admits(const DeclFacts& d) const;
  std::vector<const Guard*> advisory_guards() const;
  int next_guard_id() const;
  friend bool operator==(const DeclaredScope&, const DeclaredScope&) = default;
};

/// Declarations whose current name matches the pattern and pass every
/// structured guard, sorted by id.
std::vector<DeclId> scope_domain(const CodeModel& model, const DeclaredScope& scope);
/// scope_domain restricted to declarations in `file`.
std::vector<DeclId> scope_domain_in(const CodeModel& model, const DeclaredScope& scope, std::string_view file);

}  // namespace corename
