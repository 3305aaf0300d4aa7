#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corename/diff.hpp"
#include "corename/refactor.hpp"

namespace corename {

namespace fs = std::filesystem;

void ChangeSet::append(const ChangeSet& delta) {
  applied.insert(applied.end(), delta.applied.begin(), delta.applied.end());
  targets.insert(targets.end(), delta.targets.begin(), delta.targets.end());
  comment_edits.insert(comment_edits.end(), delta.comment_edits.begin(), delta.comment_edits.end());
  model_versions.insert(model_versions.end(), delta.model_versions.begin(), delta.model_versions.end());
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::TargetUnresolved: return "target_unresolved";
    case Violation::Kind::InvalidName: return "invalid_name";
    case Violation::Kind::Unchanged: return "unchanged";
    case Violation::Kind::SiblingCollision: return "sibling_collision";
    case Violation::Kind::Shadowing: return "shadowing";
    case Violation::Kind::OverrideConflict: return "override_conflict";
  }
  return "?";
}

namespace {

std::string join_messages(const std::vector<Violation>& vs) {
  std::string out = "rename preconditions violated";
  for (const Violation& v : vs) out += "; " + std::string(to_string(v.kind)) + ": " + v.message;
  return out;
}

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct TrialResult {
  PreconditionReport report;
  std::optional<CodeModel> model;
  std::vector<TextEdit> edits;
  std::map<std::string, std::string> texts;
};

// Direct checks that need no rewrite.
void direct_checks(const CodeModel& model, const RenameRefactoring& r, PreconditionReport& rep) {
  auto target = find_target(model, r);
  if (!target) {
    rep.violations.push_back({Violation::Kind::TargetUnresolved, r.file_path, r.line_number,
                              "no unique " + std::string(to_string(r.identifier_type)) + " '" + r.old_name +
                                  "' declared at " + r.file_path + ":" + std::to_string(r.line_number)});
    return;
  }
  rep.target = target;
  const Declaration& d = model.decl(*target);
  rep.group = d.kind == DeclKind::Method ? model.override_group(*target) : std::vector<DeclId>{*target};
  if (!is_valid_identifier(r.new_name))
    rep.violations.push_back({Violation::Kind::InvalidName, d.file, d.line,
                              "'" + r.new_name + "' is not a valid identifier"});
  if (r.new_name == d.name)
    rep.violations.push_back({Violation::Kind::Unchanged, d.file, d.line, "new name equals old name"});
  for (DeclId m : rep.group) {
    const Declaration& member = model.decl(m);
    for (const Declaration& other : model.declarations()) {
      if (other.id == m || other.kind != member.kind || other.name != r.new_name) continue;
      bool sibling = member.kind == DeclKind::Class ||
                     (other.owner == member.owner && (member.kind != DeclKind::Method || other.arity == member.arity));
      if (sibling)
        rep.violations.push_back({Violation::Kind::SiblingCollision, other.file, other.line,
                                  std::string(to_string(member.kind)) + " '" + r.new_name + "' already declared"});
    }
  }
}

// Binding isomorphism between the pre- and post-rename models.
void compare_bindings(const CodeModel& before, const CodeModel& after, const std::vector<DeclId>& group,
                      const std::string& new_name, PreconditionReport& rep) {
  const auto& da = before.declarations();
  const auto& db = after.declarations();
  if (da.size() != db.size()) {
    rep.violations.push_back({Violation::Kind::SiblingCollision, "", 0, "declaration set changed"});
    return;
  }
  for (std::size_t i = 0; i < da.size(); ++i) {
    bool renamed = std::find(group.begin(), group.end(), da[i].id) != group.end();
    const std::string& expect = renamed ? new_name : da[i].name;
    if (da[i].kind != db[i].kind || da[i].owner != db[i].owner || da[i].file != db[i].file ||
        db[i].name != expect) {
      rep.violations.push_back({Violation::Kind::SiblingCollision, db[i].file, db[i].line,
                                "declaration '" + da[i].name + "' changed identity"});
      return;
    }
  }
  const auto& ra = before.references();
  const auto& rb = after.references();
  if (ra.size() != rb.size()) {
    rep.violations.push_back({Violation::Kind::Shadowing, "", 0, "reference count changed"});
    return;
  }
  for (std::size_t i = 0; i < ra.size(); ++i) {
    if (ra[i].file != rb[i].file || ra[i].target != rb[i].target) {
      const Declaration& now = after.decl(rb[i].target);
      rep.violations.push_back({Violation::Kind::Shadowing, rb[i].file, rb[i].line,
                                "reference to '" + before.decl(ra[i].target).name + "' would bind to " +
                                    std::string(to_string(now.kind)) + " '" + now.name + "' at " + now.file + ":" +
                                    std::to_string(now.line)});
      return;
    }
  }
  for (const Declaration& d : da) {
    if (d.kind != DeclKind::Method) continue;
    if (before.overridden(d.id) != after.overridden(d.id) || before.override_group(d.id) != after.override_group(d.id)) {
      rep.violations.push_back({Violation::Kind::OverrideConflict, d.file, d.line,
                                "override relation of method '" + d.name + "' would change"});
      return;
    }
  }
}

TrialResult trial_rename(const CodeModel& model, const RenameRefactoring& r) {
  TrialResult t;
  direct_checks(model, r, t.report);
  if (!t.report.ok()) return t;
  t.edits = rename_edits(model, t.report.group, r.new_name);
  t.texts = apply_edits(model, t.edits);
  try {
    CodeModel next = reparse(model, t.texts);
    compare_bindings(model, next, t.report.group, r.new_name, t.report);
    if (t.report.ok()) t.model = std::move(next);
  } catch (const ResolutionError& e) {
    std::string what = e.what();
    bool collision = what.find("duplicate") != std::string::npos || what.find("already defined") != std::string::npos;
    t.report.violations.push_back(
        {collision ? Violation::Kind::SiblingCollision : Violation::Kind::Shadowing, e.file(), e.line(), what});
  } catch (const SyntaxError& e) {
    t.report.violations.push_back({Violation::Kind::InvalidName, e.file(), e.line(), e.what()});
  }
  return t;
}

}  // namespace

PreconditionViolated::PreconditionViolated(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::vector<TextEdit> rename_edits(const CodeModel& model, const std::vector<DeclId>& group,
                                   const std::string& new_name) {
  std::vector<TextEdit> edits;
  for (DeclId id : group) {
    const Declaration& d = model.decl(id);
    edits.push_back({d.file, d.line, d.span, new_name});
    for (const Reference* ref : model.references_to(id))
      if (!ref->in_comment) edits.push_back({ref->file, ref->line, ref->span, new_name});
  }
  std::sort(edits.begin(), edits.end(),
            [](const TextEdit& a, const TextEdit& b) { return std::tie(a.file, a.span) < std::tie(b.file, b.span); });
  edits.erase(std::unique(edits.begin(), edits.end(),
                          [](const TextEdit& a, const TextEdit& b) { return a.file == b.file && a.span == b.span; }),
              edits.end());
  return edits;
}

std::map<std::string, std::string> apply_edits(const CodeModel& model, const std::vector<TextEdit>& edits) {
  std::map<std::string, std::string> texts;
  std::map<std::string, std::vector<const TextEdit*>> by_file;
  for (const TextEdit& e : edits) by_file[e.file].push_back(&e);
  for (auto& [file, list] : by_file) {
    const SourceFile* src = model.layout().find(file);
    if (!src) throw InternalReparseFailure("edit targets unknown file " + file);
    std::string text = src->text;
    std::sort(list.begin(), list.end(), [](const TextEdit* a, const TextEdit* b) { return a->span.begin > b->span.begin; });
    for (const TextEdit* e : list) text.replace(e->span.begin, e->span.size(), e->replacement);
    texts.emplace(file, std::move(text));
  }
  return texts;
}

PreconditionReport check_preconditions(const CodeModel& model, const RenameRefactoring& r) {
  return trial_rename(model, r).report;
}

RenameOutcome apply_rename(const CodeModel& model, const RenameRefactoring& r) {
  TrialResult t = trial_rename(model, r);
  if (!t.report.ok()) throw PreconditionViolated(t.report.violations);
  if (!t.model) throw InternalReparseFailure("rename produced no model");
  RenameOutcome out{std::move(*t.model), {}, std::move(t.edits)};
  RenameRefactoring applied = r;
  const Declaration& d = model.decl(*t.report.target);
  applied.line_number = d.line;
  applied.identifier_type = d.kind;
  out.delta.applied.push_back(applied);
  out.delta.targets.push_back(*t.report.target);
  out.delta.model_versions.push_back(out.model.version());
  return out;
}

CommentOutcome update_comment(const CodeModel& model, const std::string& file, const std::string& old_token,
                              const std::string& new_token) {
  const SourceFile* src = model.layout().find(file);
  if (!src || old_token.empty() || old_token == new_token) return {model, {}};
  std::vector<TextEdit> edits;
  for (const Span& c : src->comments) {
    std::string_view body(src->text.data() + c.begin, c.size());
    std::size_t pos = 0;
    while ((pos = body.find(old_token, pos)) != std::string_view::npos) {
      std::size_t end = pos + old_token.size();
      bool whole = (pos == 0 || !ident_char(body[pos - 1])) && (end == body.size() || !ident_char(body[end]));
      if (whole) {
        Span s{c.begin + pos, c.begin + end};
        edits.push_back({file, src->line_of(s.begin), s, new_token});
      }
      pos = end;
    }
  }
  if (edits.empty()) return {model, {}};
  auto texts = apply_edits(model, edits);
  CodeModel next = reparse(model, texts);
  const SourceFile* after = next.layout().find(file);
  CommentOutcome out{std::move(next), {}};
  int last = 0;
  for (const TextEdit& e : edits) {
    if (e.line == last) continue;
    last = e.line;
    out.edits.push_back({file, e.line, std::string(src->line_text(e.line)), std::string(after->line_text(e.line))});
  }
  return out;
}

// ─── Workspace ─────────────────────────────────────────────────

Workspace::Workspace(CodeModel initial, bool materialize)
    : initial_(initial), model_(std::move(initial)), materialize_(materialize) {}

Workspace::Trial& Workspace::trial(const RenameRefactoring& r) {
  for (Trial& t : trials_)
    if (t.version == model_.version() && t.r == r) return t;
  if (trials_.size() > 64) trials_.clear();
  TrialResult res = trial_rename(model_, r);
  trials_.push_back({model_.version(), r, std::move(res.report), std::move(res.model), std::move(res.edits),
                     std::move(res.texts)});
  return trials_.back();
}

PreconditionReport Workspace::check(const RenameRefactoring& r) { return trial(r).report; }

ChangeSet Workspace::apply(const RenameRefactoring& r) {
  ++tool_calls_;
  Trial& t = trial(r);
  if (!t.report.ok()) throw PreconditionViolated(t.report.violations);
  if (!t.model) throw InternalReparseFailure("rename produced no model");
  if (materialize_) write_files(t.texts);
  ChangeSet delta;
  RenameRefactoring applied = r;
  const Declaration& d = model_.decl(*t.report.target);
  applied.line_number = d.line;
  applied.identifier_type = d.kind;
  delta.applied.push_back(applied);
  delta.targets.push_back(*t.report.target);
  CodeModel next = std::move(*t.model);
  trials_.clear();
  model_ = std::move(next);
  delta.model_versions.push_back(model_.version());
  changes_.append(delta);
  return delta;
}

std::vector<CommentEdit> Workspace::update_comment(const std::string& file, const std::string& old_token,
                                                   const std::string& new_token) {
  ++tool_calls_;
  CommentOutcome out = corename::update_comment(model_, file, old_token, new_token);
  if (out.edits.empty()) return {};
  if (materialize_) {
    const SourceFile* f = out.model.layout().find(file);
    write_files({{file, f->text}});
  }
  trials_.clear();
  model_ = std::move(out.model);
  changes_.comment_edits.insert(changes_.comment_edits.end(), out.edits.begin(), out.edits.end());
  return out.edits;
}

void Workspace::record_preapplied(const RenameRefactoring& r, DeclId target) {
  changes_.applied.push_back(r);
  changes_.targets.push_back(target);
  changes_.model_versions.push_back(model_.version());
}

void Workspace::write_files(const std::map<std::string, std::string>& texts) {
  // Snapshot every file first so a partial write can be undone.
  std::map<fs::path, std::string> snapshot;
  for (const auto& [file, text] : texts) {
    fs::path p = fs::path(model_.layout().root_dir) / file;
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    snapshot.emplace(p, buf.str());
  }
  try {
    for (const auto& [file, text] : texts) {
      fs::path p = fs::path(model_.layout().root_dir) / file;
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      out << text;
      if (!out) throw std::runtime_error("cannot write " + p.string());
    }
  } catch (...) {
    for (const auto& [p, text] : snapshot) {
      std::ofstream out(p, std::ios::binary | std::ios::trunc);
      out << text;
    }
    throw;
  }
}

std::vector<std::string> Workspace::changed_files() const {
  std::vector<std::string> out;
  for (const SourceFile& f : model_.layout().files) {
    const SourceFile* old = initial_.layout().find(f.path);
    if (!old || old->text != f.text) out.push_back(f.path);
  }
  return out;
}

std::string Workspace::unified_diff() const {
  std::string out;
  for (const std::string& path : changed_files()) {
    const SourceFile* old = initial_.layout().find(path);
    out += corename::unified_diff(path, old ? old->text : "", model_.layout().find(path)->text);
  }
  return out;
}

}  // namespace corename
