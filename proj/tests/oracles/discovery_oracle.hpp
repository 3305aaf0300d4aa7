#pragma once

// File discovery by brute force: override groups from the superclass chain,
// slice files from the closure oracle, keyword hits by regex.

#include <map>
#include <regex>
#include <set>
#include <string>

#include "corename/refactor.hpp"
#include "oracles/slice_oracle.hpp"

namespace oracle {

/// Methods connected by "overrides" (same name and arity in an ancestor), as components.
inline std::set<std::uint32_t> override_component(const corename::CodeModel& m, corename::DeclId method) {
  const auto& decls = m.declarations();
  auto ancestors = [&](corename::DeclId cls) {
    std::set<std::uint32_t> out;
    for (auto cur = m.superclass(cls); cur; cur = m.superclass(*cur)) out.insert(cur->value);
    return out;
  };
  auto related = [&](const corename::Declaration& a, const corename::Declaration& b) {
    if (a.kind != corename::DeclKind::Method || b.kind != corename::DeclKind::Method) return false;
    if (a.name != b.name || a.arity != b.arity || !a.owner || !b.owner) return false;
    return ancestors(*a.owner).count(b.owner->value) || ancestors(*b.owner).count(a.owner->value);
  };
  std::set<std::uint32_t> group{method.value};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& d : decls) {
      if (group.count(d.id.value)) continue;
      for (std::uint32_t g : group)
        if (related(d, decls[g])) {
          group.insert(d.id.value);
          grew = true;
          break;
        }
    }
  }
  return group;
}

/// Closures may be passed in; renames leave them unchanged.
inline std::set<std::string> slice_files(const corename::CodeModel& m, const corename::ChangeSet& c,
                                         const Matrix* forward_reach = nullptr,
                                         const Matrix* backward_reach = nullptr) {
  std::set<std::uint32_t> targets;
  for (corename::DeclId id : c.targets) {
    if (m.decl(id).kind == corename::DeclKind::Method) {
      auto g = override_component(m, id);
      targets.insert(g.begin(), g.end());
    } else {
      targets.insert(id.value);
    }
  }
  std::set<std::string> out;
  for (bool forward : {true, false}) {
    const Matrix* given = forward ? forward_reach : backward_reach;
    Matrix computed = given ? Matrix{} : dependence_closure(m, forward);
    const Matrix& reach = given ? *given : computed;
    for (std::uint32_t t : targets)
      for (std::uint32_t s : slice_ids(m, reach, corename::DeclId{t}, forward)) out.insert(m.statements()[s].file);
  }
  return out;
}

inline std::string parent_dir(const std::string& path) {
  auto slash = path.rfind('/');
  return slash == std::string::npos ? "" : path.substr(0, slash);
}

/// Directories: each applied rename's file directory with its source-dir
/// prefix swapped for every source dir.
inline std::set<std::string> keyword_dirs(const corename::ProjectLayout& layout, const corename::ChangeSet& c) {
  std::set<std::string> out;
  for (const auto& r : c.applied) {
    std::string dir = parent_dir(r.file_path);
    std::string tail = dir;
    for (const std::string& sd : layout.source_dirs) {
      if (sd == ".") continue;
      if (dir == sd) tail = "";
      else if (dir.rfind(sd + "/", 0) == 0) tail = dir.substr(sd.size() + 1);
    }
    for (const std::string& sd : layout.source_dirs) {
      if (sd == ".") out.insert(tail);
      else out.insert(tail.empty() ? sd : sd + "/" + tail);
    }
  }
  return out;
}

inline std::set<std::string> keyword_search(const corename::ProjectLayout& layout, const corename::ChangeSet& c) {
  std::set<std::string> out;
  if (c.applied.empty()) return out;
  std::set<std::string> dirs = oracle::keyword_dirs(layout, c);
  for (const auto& f : layout.files) {
    if (!dirs.count(parent_dir(f.path))) continue;
    for (const auto& r : c.applied) {
      if (std::regex_search(f.text, std::regex("\\b" + r.old_name + "\\b"))) {
        out.insert(f.path);
        break;
      }
    }
  }
  return out;
}

}  // namespace oracle
