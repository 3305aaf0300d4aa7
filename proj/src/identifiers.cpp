#include <cctype>

#include "corename/identifiers.hpp"

namespace corename {

namespace {
bool upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
}  // namespace

SplitName split_identifier(std::string_view name) {
  SplitName out;
  std::size_t b = 0, e = name.size();
  while (b < e && name[b] == '_') ++b;
  while (e > b && name[e - 1] == '_') --e;
  out.prefix = std::string(name.substr(0, b));
  out.suffix = std::string(name.substr(e));

  std::string sep;
  std::size_t i = b;
  while (i < e) {
    if (name[i] == '_') {
      sep = "_";
      while (i < e && name[i] == '_') ++i;
      continue;
    }
    std::size_t start = i;
    ++i;
    while (i < e && name[i] != '_') {
      char prev = name[i - 1], cur = name[i];
      // fooBar | v2Bar
      if (upper(cur) && !upper(prev)) break;
      // HTTPServer: split before the last capital of an acronym run
      if (upper(cur) && upper(prev) && i + 1 < e && lower(name[i + 1])) break;
      ++i;
    }
    out.tokens.push_back({std::string(name.substr(start, i - start)), sep});
    sep.clear();
  }
  return out;
}

std::string join_identifier(const SplitName& name) {
  std::string out = name.prefix;
  for (std::size_t i = 0; i < name.tokens.size(); ++i) {
    if (i > 0) out += name.tokens[i].sep;
    out += name.tokens[i].text;
  }
  out += name.suffix;
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> identifier_words(std::string_view name) {
  std::vector<std::string> out;
  for (const NameToken& t : split_identifier(name).tokens) out.push_back(to_lower(t.text));
  return out;
}

Casing casing_of(std::string_view token) {
  bool any_lower = false, any_upper = false;
  for (char c : token) {
    any_lower |= lower(c);
    any_upper |= upper(c);
  }
  if (!any_upper) return Casing::Lower;
  // Single capital letters ("A" in "getA") behave like capitalized words.
  if (!any_lower && token.size() > 1) return Casing::Upper;
  if (!token.empty() && alpha(token[0]) && upper(token[0])) return Casing::Capitalized;
  return any_lower ? Casing::Lower : Casing::Upper;
}

std::string apply_casing(std::string_view word, Casing casing) {
  std::string out(word);
  switch (casing) {
    case Casing::Lower:
      for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      break;
    case Casing::Upper:
      for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    case Casing::Capitalized:
      for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
      break;
  }
  return out;
}

std::string_view word_stem(std::string_view word) {
  if (word.size() > 2 && (word.back() == 's' || word.back() == 'S') && word[word.size() - 2] != 's' &&
      word[word.size() - 2] != 'S')
    return word.substr(0, word.size() - 1);
  return word;
}

bool is_plural(std::string_view word) { return word_stem(word).size() != word.size(); }

}  // namespace corename
