#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace corename {

// Identifier word splitting: camelCase, PascalCase, snake_case and
// SCREAMING_SNAKE. Digits stay attached to the preceding letters.

enum class Casing { Lower, Upper, Capitalized };

struct NameToken {
  std::string text;
  std::string sep;  // separator emitted before this token ("" or "_")
};

struct SplitName {
  std::string prefix;  // leading underscores
  std::vector<NameToken> tokens;
  std::string suffix;  // trailing underscores
};

SplitName split_identifier(std::string_view name);
std::string join_identifier(const SplitName& name);

/// Lower-cased words of an identifier.
std::vector<std::string> identifier_words(std::string_view name);

Casing casing_of(std::string_view token);
std::string apply_casing(std::string_view word, Casing casing);
std::string to_lower(std::string_view text);

/// Word with one trailing plural 's' removed (words longer than 2 chars).
std::string_view word_stem(std::string_view word);
bool is_plural(std::string_view word);

}  // namespace corename
