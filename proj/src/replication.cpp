#include <algorithm>
#include <cctype>

#include "corename/replication.hpp"

namespace corename {

namespace {

std::set<DeclId> renamed_decls(const CodeModel& model, const ChangeSet& changes) {
  std::set<DeclId> out;
  for (DeclId id : changes.targets) {
    if (id.value >= model.declarations().size()) continue;
    if (model.decl(id).kind == DeclKind::Method)
      for (DeclId m : model.override_group(id)) out.insert(m);
    else
      out.insert(id);
  }
  return out;
}

std::set<std::string> files_of(const CodeModel& model, DeclId id) {
  std::set<std::string> out;
  for (auto dir : {SliceDirection::Forward, SliceDirection::Backward})
    for (StmtId s : slice_statements(model, id, dir)) out.insert(model.stmt(s).file);
  return out;
}

bool contains_token(const std::string& text, const std::string& token) {
  auto ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    std::size_t end = pos + token.size();
    if ((pos == 0 || !ident(text[pos - 1])) && (end == text.size() || !ident(text[end]))) return true;
    pos = end;
  }
  return false;
}

}  // namespace

std::set<std::string> slice_files(const CodeModel& model, const ChangeSet& changes) {
  std::set<std::string> out;
  for (DeclId id : renamed_decls(model, changes)) {
    auto f = files_of(model, id);
    out.insert(f.begin(), f.end());
  }
  return out;
}

std::set<std::string> SliceCache::files(const CodeModel& model, const ChangeSet& changes) {
  std::set<std::string> out;
  for (DeclId id : renamed_decls(model, changes)) {
    auto it = memo_.find(id);
    if (it == memo_.end()) it = memo_.emplace(id, files_of(model, id)).first;
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

std::set<std::string> keyword_dirs(const ProjectLayout& layout, const ChangeSet& changes) {
  std::set<std::string> dirs;
  for (const RenameRefactoring& r : changes.applied) {
    std::string sd = layout.source_dir_of(r.file_path);
    std::string dir = ProjectLayout::dir_of(r.file_path);
    std::string rel;
    if (sd == ".") rel = dir;
    else if (dir.size() > sd.size()) rel = dir.substr(sd.size() + 1);
    for (const std::string& other : layout.source_dirs) {
      if (other == ".") dirs.insert(rel);
      else dirs.insert(rel.empty() ? other : other + "/" + rel);
    }
  }
  return dirs;
}

std::set<std::string> keyword_search(const ProjectLayout& layout, const DeclaredScope&, const ChangeSet& changes) {
  std::set<std::string> out;
  if (changes.applied.empty()) return out;
  std::set<std::string> keywords;
  for (const RenameRefactoring& r : changes.applied) keywords.insert(r.old_name);
  std::set<std::string> dirs = keyword_dirs(layout, changes);
  for (const SourceFile& f : layout.files) {
    if (!dirs.count(ProjectLayout::dir_of(f.path))) continue;
    for (const std::string& k : keywords) {
      if (contains_token(f.text, k)) {
        out.insert(f.path);
        break;
      }
    }
  }
  return out;
}

void to_json(json& j, const Discovery& d) {
  j = json{{"struct", d.f_struct}, {"sem", d.f_sem}, {"candidates", d.candidates}, {"next", d.next}};
}

Discovery discover_and_filter(const CodeModel& model, const DeclaredScope& scope, const ChangeSet& changes,
                              const std::set<std::string>& visited, Reasoner& reasoner, SliceCache* cache) {
  Discovery d;
  auto fs = cache ? cache->files(model, changes) : slice_files(model, changes);
  auto fm = keyword_search(model.layout(), scope, changes);
  d.f_struct.assign(fs.begin(), fs.end());
  d.f_sem.assign(fm.begin(), fm.end());
  std::set<std::string> seen;
  for (const auto* list : {&d.f_struct, &d.f_sem})
    for (const std::string& f : *list)
      if (!visited.count(f) && seen.insert(f).second) d.candidates.push_back(f);
  for (const std::string& f : d.candidates)
    if (reasoner.filter_file(model, f, scope)) d.next.push_back(f);
  return d;
}

}  // namespace corename
