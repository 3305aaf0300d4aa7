#include "support/scenarios.hpp"

#include <filesystem>

#include "corename/identifiers.hpp"
#include "corename/refactor.hpp"
#include "corename/scope.hpp"

namespace scenario {

using namespace corename;

std::optional<Scenario> random_scenario(unsigned index, const gen::Options& options) {
  std::mt19937 rng(index);
  Scenario s;
  s.model = parse_texts(".", gen::generate(rng, options));
  const auto& decls = s.model.declarations();
  if (decls.empty()) return std::nullopt;
  const Declaration& d = decls[rng() % decls.size()];
  std::vector<std::string> words = identifier_words(d.name);
  NamePattern p;
  p.old_fragment = std::vector<std::string>{words[rng() % words.size()]};
  p.new_fragment = std::vector<std::string>{gen::vocabulary()[rng() % gen::vocabulary().size()]};
  std::optional<std::string> renamed = apply_pattern(p, d.name);
  if (!renamed || *renamed == d.name) return std::nullopt;
  s.seed = RenameRefactoring{d.file, d.name, *renamed, d.line, d.kind};
  if (!check_preconditions(s.model, s.seed).ok()) return std::nullopt;
  s.accept_p = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  s.feedback_seed = static_cast<unsigned>(rng());
  return s;
}

std::vector<std::string> fixture_projects() {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(CORENAME_FIXTURES))
    if (e.is_directory() && fs::exists(e.path() / "src")) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scenario
