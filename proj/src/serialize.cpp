#include <regex>

#include "corename/serialize.hpp"

namespace corename {

namespace {

DeclKind kind_from(const json& j) {
  auto k = parse_decl_kind(j.get<std::string>());
  if (!k) throw json::other_error::create(501, "unknown identifier_type " + j.get<std::string>(), &j);
  return *k;
}

Visibility vis_from(const json& j) {
  auto v = parse_visibility(j.get<std::string>());
  if (!v) throw json::other_error::create(501, "unknown visibility " + j.get<std::string>(), &j);
  return *v;
}

std::string_view atom_name(GuardAtom::Kind k) {
  switch (k) {
    case GuardAtom::Kind::ExcludeKind: return "exclude_kind";
    case GuardAtom::Kind::ExcludeVisibility: return "exclude_visibility";
    case GuardAtom::Kind::ExcludeNameRegex: return "exclude_name_regex";
    case GuardAtom::Kind::RestrictDir: return "restrict_dir";
  }
  return "?";
}

}  // namespace

void to_json(json& j, const RenameRefactoring& r) {
  j = json{{"file_path", r.file_path},
           {"old_name", r.old_name},
           {"new_name", r.new_name},
           {"line_number", r.line_number},
           {"identifier_type", to_string(r.identifier_type)}};
}

void from_json(const json& j, RenameRefactoring& r) {
  j.at("file_path").get_to(r.file_path);
  j.at("old_name").get_to(r.old_name);
  j.at("new_name").get_to(r.new_name);
  j.at("line_number").get_to(r.line_number);
  r.identifier_type = kind_from(j.at("identifier_type"));
}

void to_json(json& j, const DeclFacts& d) {
  j = json{{"kind", to_string(d.kind)}, {"file", d.file}, {"name", d.name}};
  j["visibility"] = d.visibility ? json(to_string(*d.visibility)) : json(nullptr);
}

void from_json(const json& j, DeclFacts& d) {
  d.kind = kind_from(j.at("kind"));
  j.at("file").get_to(d.file);
  j.at("name").get_to(d.name);
  if (j.contains("visibility") && !j["visibility"].is_null()) d.visibility = vis_from(j["visibility"]);
  else d.visibility.reset();
}

void to_json(json& j, const NamePattern& p) {
  j = json{{"old_fragment", p.old_fragment}, {"new_fragment", p.new_fragment}, {"display", p.display()}};
  if (p.verbatim_old) j["verbatim_old"] = *p.verbatim_old;
  if (p.verbatim_new) j["verbatim_new"] = *p.verbatim_new;
}

void from_json(const json& j, NamePattern& p) {
  p = NamePattern{};
  j.at("old_fragment").get_to(p.old_fragment);
  j.at("new_fragment").get_to(p.new_fragment);
  if (j.contains("verbatim_old")) p.verbatim_old = j["verbatim_old"].get<std::string>();
  if (j.contains("verbatim_new")) p.verbatim_new = j["verbatim_new"].get<std::string>();
}

void to_json(json& j, const GuardAtom& a) {
  j = json{{"op", atom_name(a.kind)}};
  switch (a.kind) {
    case GuardAtom::Kind::ExcludeKind: j["arg"] = to_string(a.decl_kind); break;
    case GuardAtom::Kind::ExcludeVisibility: j["arg"] = to_string(a.visibility); break;
    default: j["arg"] = a.text; break;
  }
}

void from_json(const json& j, GuardAtom& a) {
  a = GuardAtom{};
  std::string op = j.at("op").get<std::string>();
  const json& arg = j.at("arg");
  if (op == "exclude_kind") {
    a.kind = GuardAtom::Kind::ExcludeKind;
    a.decl_kind = kind_from(arg);
  } else if (op == "exclude_visibility") {
    a.kind = GuardAtom::Kind::ExcludeVisibility;
    a.visibility = vis_from(arg);
  } else if (op == "exclude_name_regex") {
    a.kind = GuardAtom::Kind::ExcludeNameRegex;
    a.text = arg.get<std::string>();
    std::regex check(a.text);  // reject malformed expressions early
  } else if (op == "restrict_dir") {
    a.kind = GuardAtom::Kind::RestrictDir;
    a.text = arg.get<std::string>();
  } else {
    throw json::other_error::create(501, "unknown guard op " + op, &j);
  }
}

void to_json(json& j, const Guard& g) {
  j = json{{"id", g.id}, {"description", g.description}};
  j["structured"] = g.structured ? json(*g.structured) : json(nullptr);
}

void from_json(const json& j, Guard& g) {
  g = Guard{};
  j.at("id").get_to(g.id);
  j.at("description").get_to(g.description);
  if (j.contains("structured") && !j["structured"].is_null())
    g.structured = j["structured"].get<std::vector<GuardAtom>>();
}

void to_json(json& j, const DeclaredScope& s) {
  j = json{{"pattern", s.pattern}, {"guards", s.guards}, {"rationale", s.rationale}, {"revision", s.revision}};
  j["parent_revision"] = s.parent_revision ? json(*s.parent_revision) : json(nullptr);
}

void from_json(const json& j, DeclaredScope& s) {
  s = DeclaredScope{};
  j.at("pattern").get_to(s.pattern);
  if (j.contains("guards")) j["guards"].get_to(s.guards);
  if (j.contains("rationale")) j["rationale"].get_to(s.rationale);
  if (j.contains("revision")) j["revision"].get_to(s.revision);
  if (j.contains("parent_revision") && !j["parent_revision"].is_null())
    s.parent_revision = j["parent_revision"].get<int>();
}

void to_json(json& j, const CommentEdit& e) {
  j = json{{"file", e.file}, {"line", e.line}, {"before", e.before}, {"after", e.after}};
}

void to_json(json& j, const ChangeSet& c) {
  j = json{{"applied", c.applied}, {"comment_edits", c.comment_edits}, {"model_versions", c.model_versions}};
}

void to_json(json& j, const Violation& v) {
  j = json{{"kind", to_string(v.kind)}, {"file", v.file}, {"line", v.line}, {"message", v.message}};
}

}  // namespace corename
