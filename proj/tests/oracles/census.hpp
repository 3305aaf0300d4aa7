#pragma once

// Grep-style token census: counts whole-token occurrences of a name in
// code (outside `//` comments and string literals). Independent of the lexer.

#include <cctype>
#include <map>
#include <string>

namespace oracle {

inline std::size_t code_token_count(const std::string& text, const std::string& name) {
  std::size_t count = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      if (text.compare(i, j - i, name) == 0 && j - i == name.size()) ++count;
      i = j - 1;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i + 1 < text.size() && std::isalnum(static_cast<unsigned char>(text[i + 1]))) ++i;
    }
  }
  return count;
}

inline std::size_t code_token_count(const std::map<std::string, std::string>& texts, const std::string& name) {
  std::size_t n = 0;
  for (const auto& [path, text] : texts) n += code_token_count(text, name);
  return n;
}

}  // namespace oracle
