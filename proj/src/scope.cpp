#include <algorithm>
#include <map>
#include <mutex>
#include <regex>

#include "corename/identifiers.hpp"
#include "corename/scope.hpp"

namespace corename {

namespace {

bool same_word(std::string_view token, std::string_view fragment_word) {
  return word_stem(to_lower(token)) == word_stem(fragment_word);
}

std::string inflect(std::string word, bool plural) {
  if (is_plural(word) == plural) return word;
  if (plural) return word + "s";
  return std::string(word_stem(word));
}

std::string camel_join(const std::vector<std::string>& words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i)
    out += i == 0 ? words[i] : apply_casing(words[i], Casing::Capitalized);
  return out;
}

const std::regex& cached_regex(const std::string& text) {
  static std::mutex mu;
  static std::map<std::string, std::regex> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(text);
  if (it == cache.end()) it = cache.emplace(text, std::regex(text, std::regex::ECMAScript)).first;
  return it->second;
}

bool under_prefix(std::string_view file, std::string_view prefix) {
  while (!prefix.empty() && prefix.back() == '/') prefix.remove_suffix(1);
  if (prefix.empty() || prefix == ".") return true;
  return file.size() > prefix.size() && file.substr(0, prefix.size()) == prefix && file[prefix.size()] == '/';
}

}  // namespace

bool NamePattern::valid() const {
  if (verbatim_old || verbatim_new) return verbatim_old && verbatim_new && *verbatim_old != *verbatim_new;
  return !old_fragment.empty() && !new_fragment.empty() && old_fragment != new_fragment;
}

std::string NamePattern::display() const {
  if (verbatim_old && verbatim_new) return *verbatim_old + " -> " + *verbatim_new;
  return camel_join(old_fragment) + " -> " + camel_join(new_fragment);
}

NamePattern make_pattern(std::string_view old_text, std::string_view new_text) {
  NamePattern p;
  p.old_fragment = identifier_words(old_text);
  p.new_fragment = identifier_words(new_text);
  return p;
}

std::optional<std::string> apply_pattern(const NamePattern& p, std::string_view name) {
  if (p.verbatim_old) {
    if (p.verbatim_new && name == *p.verbatim_old) return *p.verbatim_new;
    return std::nullopt;
  }
  const auto& from = p.old_fragment;
  const auto& to = p.new_fragment;
  if (from.empty() || to.empty()) return std::nullopt;

  SplitName split = split_identifier(name);
  const auto& tokens = split.tokens;
  bool snake = std::any_of(tokens.begin(), tokens.end(), [](const NameToken& t) { return !t.sep.empty(); });

  std::vector<NameToken> out;
  bool matched = false;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool hit = i + from.size() <= tokens.size();
    for (std::size_t k = 0; hit && k < from.size(); ++k) hit = same_word(tokens[i + k].text, from[k]);
    if (!hit) {
      out.push_back(tokens[i]);
      ++i;
      continue;
    }
    matched = true;
    for (std::size_t j = 0; j < to.size(); ++j) {
      NameToken t;
      std::string word = to[j];
      if (j < from.size()) {
        const NameToken& src = tokens[i + j];
        bool token_plural = is_plural(src.text);
        if (token_plural != is_plural(from[j]) && is_plural(word) == is_plural(from[j]))
          word = inflect(word, token_plural);
        t.text = apply_casing(word, casing_of(src.text));
        t.sep = src.sep;
      } else {
        Casing prev = out.empty() ? Casing::Lower : casing_of(out.back().text);
        if (!snake && prev == Casing::Lower && !out.empty()) prev = Casing::Capitalized;
        t.text = apply_casing(word, prev);
        t.sep = snake ? "_" : "";
      }
      out.push_back(std::move(t));
    }
    i += from.size();
  }
  if (!matched) return std::nullopt;
  // A camelCase name whose leading words were dropped must stay lower-initial.
  if (!out.empty() && !tokens.empty() && out.size() != tokens.size() &&
      casing_of(tokens.front().text) == Casing::Lower && casing_of(out.front().text) == Casing::Capitalized)
    out.front().text = apply_casing(out.front().text, Casing::Lower);
  if (!out.empty()) out.front().sep.clear();
  split.tokens = std::move(out);
  std::string result = join_identifier(split);
  if (result == name || result.empty()) return std::nullopt;
  return result;
}

NamePattern extract_pattern(std::string_view old_name, std::string_view new_name) {
  auto ow = identifier_words(old_name);
  auto nw = identifier_words(new_name);
  std::size_t pre = 0;
  while (pre < ow.size() && pre < nw.size() && ow[pre] == nw[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < ow.size() - pre && suf < nw.size() - pre && ow[ow.size() - 1 - suf] == nw[nw.size() - 1 - suf]) ++suf;

  auto try_span = [&](std::size_t b, std::size_t oe, std::size_t ne) -> std::optional<NamePattern> {
    NamePattern p;
    p.old_fragment.assign(ow.begin() + b, ow.begin() + oe);
    p.new_fragment.assign(nw.begin() + b, nw.begin() + ne);
    if (!p.valid()) return std::nullopt;
    auto out = apply_pattern(p, old_name);
    if (out && *out == new_name) return p;
    return std::nullopt;
  };

  std::size_t oe = ow.size() - suf, ne = nw.size() - suf;
  if (pre < oe || pre < ne) {
    // One word of right context (the head noun) when there is one,
    // otherwise one word of left context for pure insertions/deletions.
    if (suf > 0) {
      if (auto p = try_span(pre, oe + 1, ne + 1)) return *p;
    } else if (pre > 0 && (pre == oe || pre == ne)) {
      if (auto p = try_span(pre - 1, oe, ne)) return *p;
    }
    if (pre < oe && pre < ne)
      if (auto p = try_span(pre, oe, ne)) return *p;
  }
  if (auto p = try_span(0, ow.size(), nw.size())) return *p;
  NamePattern p;
  p.verbatim_old = std::string(old_name);
  p.verbatim_new = std::string(new_name);
  return p;
}

bool GuardAtom::holds(const DeclFacts& d) const {
  switch (kind) {
    case Kind::ExcludeKind:
      return d.kind == decl_kind;
    case Kind::ExcludeVisibility:
      return d.visibility && *d.visibility == visibility;
    case Kind::ExcludeNameRegex:
      return std::regex_search(d.name, cached_regex(text));
    case Kind::RestrictDir:
      return !under_prefix(d.file, text);
  }
  return false;
}

bool Guard::excludes(const DeclFacts& d) const {
  if (!structured || structured->empty()) return false;
  return std::all_of(structured->begin(), structured->end(), [&](const GuardAtom& a) { return a.holds(d); });
}

std::string describe_atoms(const std::vector<GuardAtom>& atoms) {
  // Rendered as a single exclusion sentence, e.g.
  // "do not rename public methods" or "do not rename methods named ^foo$".
  std::string vis, kind = "declarations", name, dir;
  for (const GuardAtom& a : atoms) {
    switch (a.kind) {
      case GuardAtom::Kind::ExcludeKind:
        kind = std::string(to_string(a.decl_kind));
        if (kind == "class") kind = "classes";
        else if (kind == "local_variable") kind = "local variables";
        else kind += "s";
        break;
      case GuardAtom::Kind::ExcludeVisibility:
        vis = std::string(to_string(a.visibility)) + " ";
        break;
      case GuardAtom::Kind::ExcludeNameRegex:
        name = " named like /" + a.text + "/";
        break;
      case GuardAtom::Kind::RestrictDir:
        dir = " outside " + a.text;
        break;
    }
  }
  return "do not rename " + vis + kind + name + dir;
}

bool DeclaredScope::admits(const DeclFacts& d) const {
  return std::none_of(guards.begin(), guards.end(), [&](const Guard& g) { return g.excludes(d); });
}

std::vector<const Guard*> DeclaredScope::advisory_guards() const {
  std::vector<const Guard*> out;
  for (const Guard& g : guards)
    if (g.advisory()) out.push_back(&g);
  return out;
}

int DeclaredScope::next_guard_id() const {
  int id = 0;
  for (const Guard& g : guards) id = std::max(id, g.id);
  return id + 1;
}

std::vector<DeclId> scope_domain(const CodeModel& model, const DeclaredScope& scope) {
  std::vector<DeclId> out;
  for (const Declaration& d : model.declarations())
    if (apply_pattern(scope.pattern, d.name) && scope.admits(facts_of(d))) out.push_back(d.id);
  return out;
}

std::vector<DeclId> scope_domain_in(const CodeModel& model, const DeclaredScope& scope, std::string_view file) {
  std::vector<DeclId> out;
  for (DeclId id : model.declarations_in(file)) {
    const Declaration& d = model.decl(id);
    if (apply_pattern(scope.pattern, d.name) && scope.admits(facts_of(d))) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace corename
