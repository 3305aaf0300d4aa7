#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "corename/reasoner.hpp"
#include "corename/refactor.hpp"
#include "corename/scope.hpp"

namespace corename {

/// Files holding at least one statement of the forward or backward slice of
/// any declaration renamed in `changes` (override groups included).
std::set<std::string> slice_files(const CodeModel& model, const ChangeSet& changes);

/// Directories searched by keyword_search: the package directory of every file
/// declaring a renamed entity, mirrored under each source dir.
std::set<std::string> keyword_dirs(const ProjectLayout& layout, const ChangeSet& changes);

/// Files directly inside keyword_dirs containing an old name of `changes` as a
/// whole, case-sensitive token (code or comment).
std::set<std::string> keyword_search(const ProjectLayout& layout, const DeclaredScope& scope, const ChangeSet& changes);

struct Discovery {
  std::vector<std::string> f_struct;    // sorted
  std::vector<std::string> f_sem;       // sorted
  std::vector<std::string> candidates;  // unique, struct first, minus visited
  std::vector<std::string> next;        // candidates the reasoner kept
};

void to_json(json& j, const Discovery& d);

/// Same as slice_files with a per-declaration memo. Valid while declarations
/// keep their ids, which renames preserve.
class SliceCache {
 public:
  std::set<std::string> files(const CodeModel& model, const ChangeSet& changes);

 private:
  std::map<DeclId, std::set<std::string>> memo_;
};

/// F_cand = (F_struct ∪ F_sem) ∖ visited, then the reasoner's filter.
Discovery discover_and_filter(const CodeModel& model, const DeclaredScope& scope, const ChangeSet& changes,
                              const std::set<std::string>& visited, Reasoner& reasoner, SliceCache* cache = nullptr);

}  // namespace corename
