#pragma once

// Recall ceiling of a session under perfect feedback, by direct simulation:
// breadth-first over files from the seed file, renaming every in-domain gold
// declaration of a visited file, then discovering files from the brute-force
// slice, keyword and domain oracles. Gold is counted once per override component.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "corename/refactor.hpp"
#include "corename/scope.hpp"
#include "oracles/discovery_oracle.hpp"
#include "oracles/domain_oracle.hpp"

namespace oracle {

struct Reachability {
  std::size_t reachable = 0;  // gold entries (seed excluded) a perfect session recovers
  std::size_t gold = 0;       // gold entries, seed excluded
  std::vector<std::string> visited;
};

inline std::set<std::uint32_t> component(const corename::CodeModel& m, corename::DeclId id) {
  if (m.decl(id).kind == corename::DeclKind::Method) return override_component(m, id);
  return {id.value};
}

inline Reachability reachability(const corename::CodeModel& initial, const corename::RenameRefactoring& seed,
                                 const std::vector<corename::RenameRefactoring>& gold,
                                 const corename::DeclaredScope& scope, int rounds_cap, int K) {
  using namespace corename;
  auto locate = [&](const RenameRefactoring& r) -> std::uint32_t {
    for (const Declaration& d : initial.declarations())
      if (d.file == r.file_path && d.name == r.old_name && d.line == r.line_number && d.kind == r.identifier_type)
        return d.id.value;
    throw std::runtime_error("gold entry does not resolve: " + r.old_name);
  };
  std::uint32_t seed_id = locate(seed);
  std::set<std::uint32_t> seed_group = component(initial, DeclId{seed_id});

  // Gold keyed by smallest member of its component; the seed's component is dropped.
  std::map<std::uint32_t, std::string> pending;  // representative -> new name
  std::map<std::uint32_t, std::uint32_t> rep_of;
  for (const RenameRefactoring& r : gold) {
    std::set<std::uint32_t> comp = component(initial, DeclId{locate(r)});
    if (comp.count(seed_id)) continue;
    std::uint32_t rep = *comp.begin();
    pending.emplace(rep, r.new_name);
    for (std::uint32_t c : comp) rep_of[c] = rep;
  }
  Reachability out;
  out.gold = pending.size();

  CodeModel m = apply_rename(initial, seed).model;
  ChangeSet changes;
  changes.applied.push_back(seed);
  changes.targets.push_back(DeclId{seed_id});

  std::deque<std::pair<std::string, int>> queue{{seed.file_path, 0}};
  std::set<std::string> enqueued{seed.file_path};
  int plans = 0;
  while (!queue.empty() && plans < K) {
    auto [file, generation] = queue.front();
    queue.pop_front();
    ++plans;
    out.visited.push_back(file);

    // Ids are stable across renames, so the domain is read before any edit.
    std::vector<DeclId> domain = oracle::scope_domain(m, scope, file);
    std::sort(domain.begin(), domain.end(), [&](DeclId a, DeclId b) { return m.decl(a).line < m.decl(b).line; });
    for (DeclId d : domain) {
      auto rep = rep_of.find(d.value);
      if (rep == rep_of.end() || !pending.count(rep->second)) continue;
      const Declaration& decl = m.decl(d);
      RenameRefactoring r{decl.file, decl.name, pending[rep->second], decl.line, decl.kind};
      m = apply_rename(m, r).model;
      changes.applied.push_back(r);
      changes.targets.push_back(d);
      pending.erase(rep->second);
      ++out.reachable;
    }

    if (generation >= rounds_cap) continue;
    std::set<std::string> f_struct = oracle::slice_files(m, changes);
    std::set<std::string> f_sem = oracle::keyword_search(m.layout(), changes);
    std::vector<std::string> candidates(f_struct.begin(), f_struct.end());
    for (const std::string& f : f_sem)
      if (!f_struct.count(f)) candidates.push_back(f);
    for (const std::string& f : candidates) {
      if (enqueued.count(f) || oracle::scope_domain(m, scope, f).empty()) continue;
      enqueued.insert(f);
      queue.emplace_back(f, generation + 1);
    }
  }
  return out;
}

}  // namespace oracle
