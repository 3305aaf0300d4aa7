#pragma once

// Scope membership by enumeration: regex word splitting, stem comparison and
// direct guard evaluation over every declaration.

#include <regex>
#include <string>
#include <vector>

#include "corename/model.hpp"
#include "corename/scope.hpp"

namespace oracle {

/// Lower-case words via boundary insertion: '_' runs, lower/digit→Upper,
/// and Upper→Upper+lower (acronym end).
inline std::vector<std::string> words(const std::string& name) {
  static const std::regex underscores("_+"), lower_upper("([a-z0-9])([A-Z])"), acronym("([A-Z])([A-Z][a-z])");
  std::string s = std::regex_replace(name, underscores, " ");
  s = std::regex_replace(s, lower_upper, "$1 $2");
  // Applied twice: regex_replace does not revisit overlapping matches.
  for (int pass = 0; pass < 2; ++pass) s = std::regex_replace(s, acronym, "$1 $2");
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + " ") {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

inline std::string stem(const std::string& w) {
  if (w.size() > 2 && w.back() == 's' && w[w.size() - 2] != 's') return w.substr(0, w.size() - 1);
  return w;
}

/// True when the pattern rewrites `name` to something different.
inline bool pattern_changes(const corename::NamePattern& p, const std::string& name) {
  if (p.verbatim_old) return name == *p.verbatim_old;
  std::vector<std::string> w = words(name);
  const auto& from = p.old_fragment;
  bool found = false;
  for (std::size_t i = 0; !found && i + from.size() <= w.size() && !from.empty(); ++i) {
    bool all = true;
    for (std::size_t k = 0; k < from.size(); ++k) all = all && stem(w[i + k]) == stem(from[k]);
    found = all;
  }
  if (!found) return false;
  if (p.new_fragment.size() != from.size()) return true;
  for (std::size_t k = 0; k < from.size(); ++k)
    if (stem(p.new_fragment[k]) != stem(from[k])) return true;
  return false;
}

inline bool atom_holds(const corename::GuardAtom& a, const corename::Declaration& d) {
  using K = corename::GuardAtom::Kind;
  switch (a.kind) {
    case K::ExcludeKind: return d.kind == a.decl_kind;
    case K::ExcludeVisibility: return d.visibility.has_value() && *d.visibility == a.visibility;
    case K::ExcludeNameRegex: return std::regex_search(d.name, std::regex(a.text));
    case K::RestrictDir: {
      std::string prefix = a.text;
      while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
      if (prefix.empty() || prefix == ".") return false;
      return d.file.rfind(prefix + "/", 0) != 0;
    }
  }
  return false;
}

inline bool excluded(const corename::DeclaredScope& scope, const corename::Declaration& d) {
  for (const corename::Guard& g : scope.guards) {
    if (!g.structured || g.structured->empty()) continue;
    bool all = true;
    for (const corename::GuardAtom& a : *g.structured) all = all && atom_holds(a, d);
    if (all) return true;
  }
  return false;
}

inline std::vector<corename::DeclId> scope_domain(const corename::CodeModel& m, const corename::DeclaredScope& scope,
                                                  const std::string& only_file = "") {
  std::vector<corename::DeclId> out;
  for (const corename::Declaration& d : m.declarations()) {
    if (!only_file.empty() && d.file != only_file) continue;
    if (pattern_changes(scope.pattern, d.name) && !excluded(scope, d)) out.push_back(d.id);
  }
  return out;
}

}  // namespace oracle
