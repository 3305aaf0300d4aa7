#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "corename/memory.hpp"
#include "corename/reasoner.hpp"
#include "corename/scope.hpp"

namespace corename {

/// A reasoner's pattern failed the seed round trip.
class PatternInconsistent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InferOutcome {
  DeclaredScope scope;
  bool pattern_inconsistent = false;  // reasoner proposal rejected, extractor used
  std::string detail;
};

/// Revision-0 scope for the seed. The pattern always maps seed.old_name to
/// seed.new_name; guards start empty.
InferOutcome infer_from_seed(const RenameRefactoring& seed, const std::string& context, Reasoner& reasoner);

struct RefineOutcome {
  DeclaredScope scope;
  std::vector<std::string> warnings;
  int guards_added = 0;
  int guards_weakened = 0;
};

/// Next scope revision after rejections. Keeps the seed round trip, never
/// drops guards and never excludes an accepted rename. Throws std::logic_error
/// when no rejection was recorded since the current scope.
RefineOutcome refine(const DeclaredScope& current, const EpisodicMemory& memory, Reasoner& reasoner,
                     const RenameRefactoring& seed);

}  // namespace corename
