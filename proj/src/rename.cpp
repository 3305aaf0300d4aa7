#include <charconv>

#include "corename/rename.hpp"

namespace corename {

std::string to_string(const RenameRefactoring& r) {
  return r.file_path + ":" + std::to_string(r.line_number) + ":" + r.old_name + ":" + r.new_name + ":" +
         std::string(to_string(r.identifier_type));
}

std::optional<RenameRefactoring> parse_rename_spec(std::string_view spec) {
  // Split from the right so the path may itself contain ':'.
  std::string_view parts[4];
  std::string_view rest = spec;
  for (int i = 3; i >= 0; --i) {
    auto pos = rest.rfind(':');
    if (pos == std::string_view::npos) return std::nullopt;
    parts[i] = rest.substr(pos + 1);
    rest = rest.substr(0, pos);
  }
  if (rest.empty()) return std::nullopt;
  RenameRefactoring r;
  r.file_path = std::string(rest);
  int line = 0;
  auto [ptr, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), line);
  if (ec != std::errc{} || ptr != parts[0].data() + parts[0].size() || line < 1) return std::nullopt;
  r.line_number = line;
  r.old_name = std::string(parts[1]);
  r.new_name = std::string(parts[2]);
  auto kind = parse_decl_kind(parts[3]);
  if (!kind || r.old_name.empty() || r.new_name.empty()) return std::nullopt;
  r.identifier_type = *kind;
  return r;
}

std::optional<DeclId> find_target(const CodeModel& model, const RenameRefactoring& r, bool use_new_name) {
  const std::string& name = use_new_name ? r.new_name : r.old_name;
  std::optional<DeclId> exact, loose;
  int loose_count = 0;
  for (DeclId id : model.declarations_in(r.file_path)) {
    const Declaration& d = model.decl(id);
    if (d.name != name || d.kind != r.identifier_type) continue;
    if (d.line == r.line_number) {
      if (exact) return std::nullopt;
      exact = id;
    }
    loose = id;
    ++loose_count;
  }
  if (exact) return exact;
  // Tolerate a stale line number when the name is unambiguous in the file.
  if (loose_count == 1) return loose;
  return std::nullopt;
}

DeclFacts facts_of(const Declaration& d) { return DeclFacts{d.kind, d.visibility, d.file, d.name}; }

}  // namespace corename
