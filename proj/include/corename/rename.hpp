#pragma once

#include <optional>
#include <string>

#include "corename/model.hpp"

namespace corename {

/// An individual rename: ⟨file_path, old_name, new_name, line_number, identifier_type⟩.
/// `file_path` and `line_number` locate the declaration, not a use site.
struct RenameRefactoring {
  std::string file_path;
  std::string old_name;
  std::string new_name;
  int line_number = 0;
  DeclKind identifier_type = DeclKind::LocalVariable;

  friend bool operator==(const RenameRefactoring&, const RenameRefactoring&) = default;
};

std::string to_string(const RenameRefactoring& r);

/// Parses "file:line:old:new:kind". Returns nullopt on malformed input.
std::optional<RenameRefactoring> parse_rename_spec(std::string_view spec);

/// Declaration targeted by `r` in `model`: same file, line, kind and name.
/// With `use_new_name` the declaration is looked up by r.new_name (pre-applied seeds).
std::optional<DeclId> find_target(const CodeModel& model, const RenameRefactoring& r, bool use_new_name = false);

/// Attributes of a declaration that guards are evaluated against.
struct DeclFacts {
  DeclKind kind = DeclKind::LocalVariable;
  std::optional<Visibility> visibility;
  std::string file;
  std::string name;
};

DeclFacts facts_of(const Declaration& d);

}  // namespace corename
