#pragma once

// Random sessions over generated projects, plus fixture discovery.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "corename/model.hpp"
#include "corename/rename.hpp"
#include "support/generator.hpp"

namespace scenario {

struct Scenario {
  corename::CodeModel model;
  corename::RenameRefactoring seed;
  double accept_p = 0.7;
  unsigned feedback_seed = 0;
};

/// Generated project plus a valid seed: one word of a random declaration's
/// name swapped for a vocabulary word. nullopt when the draw yields no valid seed.
std::optional<Scenario> random_scenario(unsigned index, const gen::Options& options = {});

/// Fixture project directories (those with a src/ folder), sorted.
std::vector<std::string> fixture_projects();

}  // namespace scenario
