#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corename {

// ─── Positions ─────────────────────────────────────────────────
// Lines are 1-based everywhere. Spans are half-open byte ranges into
// the file text.

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Location {
  std::string file;
  int line = 0;

  friend bool operator==(const Location&, const Location&) = default;
  friend auto operator<=>(const Location&, const Location&) = default;
};

enum class DeclKind { Class, Method, Field, Parameter, LocalVariable };
enum class Visibility { Public, Private };

std::string_view to_string(DeclKind kind);
std::string_view to_string(Visibility vis);
/// Accepts the canonical names plus "variable"/"local" for locals.
std::optional<DeclKind> parse_decl_kind(std::string_view text);
std::optional<Visibility> parse_visibility(std::string_view text);

/// Priority used by seed selection: class first, local variable last.
int seed_priority(DeclKind kind);

struct DeclId {
  std::uint32_t value = 0;
  friend bool operator==(DeclId, DeclId) = default;
  friend auto operator<=>(DeclId, DeclId) = default;
};

struct StmtId {
  std::uint32_t value = 0;
  friend bool operator==(StmtId, StmtId) = default;
  friend auto operator<=>(StmtId, StmtId) = default;
};

// ─── Errors ────────────────────────────────────────────────────

class ModelError : public std::runtime_error {
 public:
  ModelError(std::string file, int line, const std::string& what)
      : std::runtime_error(what), file_(std::move(file)), line_(line) {}
  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

class SyntaxError : public ModelError {
 public:
  SyntaxError(std::string file, int line, std::string message);
  const std::string& message() const { return message_; }

 private:
  std::string message_;
};

class ResolutionError : public ModelError {
 public:
  ResolutionError(std::string file, int line, std::string name, std::string detail = {});
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// ─── Source ────────────────────────────────────────────────────

struct FileAst;

struct SourceFile {
  std::string path;  // relative to the project root, '/' separated
  std::string text;
  std::vector<std::size_t> line_index;  // byte offset of each line start
  std::vector<Span> comments;           // spans of `//` comments, including the slashes

  int line_of(std::size_t offset) const;
  std::string_view line_text(int line) const;
  int line_count() const { return static_cast<int>(line_index.size()); }
  bool in_comment(std::size_t offset) const;
};

SourceFile make_source_file(std::string path, std::string text);

struct ProjectLayout {
  std::string root_dir;
  std::vector<std::string> source_dirs;  // relative, e.g. "src/main"
  std::vector<SourceFile> files;         // sorted by path

  const SourceFile* find(std::string_view path) const;
  /// Source dir containing `path`; "." when the project root is the only source dir.
  std::string source_dir_of(std::string_view path) const;
  /// Package of a file: its directory relative to the source dir, dot separated.
  std::string package_of(std::string_view path) const;
  /// Directory part of a relative path ("" for top-level files).
  static std::string dir_of(std::string_view path);
};

// ─── Semantic model ────────────────────────────────────────────

struct Declaration {
  DeclId id;
  DeclKind kind = DeclKind::Class;
  std::string name;
  std::string file;
  int line = 0;
  std::optional<DeclId> owner;
  std::optional<Visibility> visibility;  // classes and members only
  Span span;
  std::string type_name;  // declared type (fields/params/locals), return type (methods)
  int arity = 0;          // methods only
};

struct Reference {
  DeclId target;
  std::string file;
  int line = 0;
  Span span;
  bool in_comment = false;
};

enum class StmtKind {
  ClassHeader,
  FieldDecl,
  MethodHeader,
  ParamDecl,
  LocalDecl,
  Assign,
  Expr,
  Return,
  Condition,
};

/// A statement node of the dependence graph. Declaration statements write
/// the declared entity; return statements write their enclosing method;
/// calls read the callee (and its override group) and write its parameters.
struct Statement {
  StmtId id;
  StmtKind kind = StmtKind::Expr;
  std::string file;
  int line = 0;
  std::optional<DeclId> method;  // enclosing method, if any
  std::vector<DeclId> reads;     // sorted, unique
  std::vector<DeclId> writes;    // sorted, unique
};

enum class SliceDirection { Forward, Backward };

class CodeModel {
 public:
  const ProjectLayout& layout() const { return layout_; }
  const std::vector<Declaration>& declarations() const { return decls_; }
  const std::vector<Reference>& references() const { return refs_; }
  const std::vector<Statement>& statements() const { return stmts_; }
  int version() const { return version_; }

  const Declaration& decl(DeclId id) const { return decls_.at(id.value); }
  const Statement& stmt(StmtId id) const { return stmts_.at(id.value); }
  StmtId decl_statement(DeclId id) const { return decl_stmt_.at(id.value); }

  /// References resolving to `id`, in (file, offset) order.
  std::vector<const Reference*> references_to(DeclId id) const;
  /// Declarations declared in `file`, in textual order.
  std::vector<DeclId> declarations_in(std::string_view file) const;
  /// def-use: statement locations that read or write the declaration.
  std::vector<Location> defuse(DeclId id) const;
  /// Caller method -> callee methods (override groups expanded).
  const std::map<DeclId, std::set<DeclId>>& calls() const { return calls_; }

  std::optional<DeclId> class_named(std::string_view name) const;
  std::optional<DeclId> superclass(DeclId cls) const;
  /// Method directly overridden by `method`, if any.
  std::optional<DeclId> overridden(DeclId method) const;
  /// All methods sharing an override relation with `method` (including itself), sorted.
  std::vector<DeclId> override_group(DeclId method) const;
  /// Smallest id of the override group for methods, the id itself otherwise.
  DeclId canonical(DeclId id) const;
  /// Statements reading / writing the declaration.
  const std::vector<StmtId>& readers(DeclId id) const { return readers_.at(id.value); }
  const std::vector<StmtId>& writers(DeclId id) const { return writers_.at(id.value); }

  /// Cached per-file ASTs, reused when a file's text is unchanged.
  const std::map<std::string, std::shared_ptr<const FileAst>>& asts() const { return asts_; }

 private:
  friend class ModelBuilder;

  ProjectLayout layout_;
  std::vector<Declaration> decls_;
  std::vector<Reference> refs_;
  std::vector<Statement> stmts_;
  std::vector<StmtId> decl_stmt_;
  std::vector<std::vector<StmtId>> readers_;
  std::vector<std::vector<StmtId>> writers_;
  std::map<DeclId, std::set<DeclId>> calls_;
  std::map<std::string, DeclId, std::less<>> classes_;
  std::map<DeclId, DeclId> superclass_;
  std::map<DeclId, DeclId> overrides_;
  std::vector<std::uint32_t> group_of_;  // per decl: canonical id
  std::map<std::uint32_t, std::vector<DeclId>> group_members_;  // groups with > 1 member
  std::vector<std::vector<std::uint32_t>> refs_by_target_;
  std::map<std::string, std::shared_ptr<const FileAst>> asts_;
  int version_ = 0;
};

// ─── Operations ────────────────────────────────────────────────

inline const std::vector<std::string>& default_source_dirs() {
  static const std::vector<std::string> dirs{"src/main", "src/test"};
  return dirs;
}

/// Scans `root` for `.mini` files and builds the resolved model.
/// Throws SyntaxError / ResolutionError.
CodeModel parse_project(const std::string& root);

/// Builds a model from in-memory texts (path -> text). `source_dirs` empty
/// means: the defaults that have at least one file, else the root itself.
CodeModel parse_texts(const std::string& root, const std::map<std::string, std::string>& texts,
                      std::vector<std::string> source_dirs = {}, int version = 0);

/// Rebuilds a model from new texts, reusing ASTs of unchanged files.
CodeModel reparse(const CodeModel& base, const std::map<std::string, std::string>& changed_texts);

/// Declarations named `name` visible in `file` (declared there or referenced
/// from there), ordered by |line - line_hint|, then kind match, then line.
std::vector<const Declaration*> resolve_identifier(const CodeModel& model, std::string_view name,
                                                   std::string_view file, int line_hint,
                                                   std::optional<DeclKind> kind_hint = std::nullopt);

/// Statement locations in the forward/backward slice of `decl`.
std::set<Location> slice(const CodeModel& model, DeclId decl, SliceDirection direction);
/// Same as slice() but returning statement ids.
std::set<StmtId> slice_statements(const CodeModel& model, DeclId decl, SliceDirection direction);

bool is_valid_identifier(std::string_view name);
bool is_keyword(std::string_view name);

/// "pkg.Class.member" style display name.
std::string qualified_name(const CodeModel& model, DeclId id);

}  // namespace corename
