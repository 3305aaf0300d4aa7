#include <algorithm>
#include <set>

#include "corename/scope_agent.hpp"

namespace corename {

InferOutcome infer_from_seed(const RenameRefactoring& seed, const std::string& context, Reasoner& reasoner) {
  InferOutcome out;
  DeclaredScope proposal;
  try {
    proposal = reasoner.infer_scope(seed, context);
    auto mapped = apply_pattern(proposal.pattern, seed.old_name);
    if (!proposal.pattern.valid() || !mapped || *mapped != seed.new_name)
      throw PatternInconsistent("proposed pattern " + proposal.pattern.display() + " maps " + seed.old_name +
                                " to " + mapped.value_or("nothing") + ", expected " + seed.new_name);
    out.scope = proposal;
  } catch (const PatternInconsistent& e) {
    out.pattern_inconsistent = true;
    out.detail = e.what();
    out.scope.pattern = extract_pattern(seed.old_name, seed.new_name);
    out.scope.rationale = proposal.rationale.empty() ? "realign " + out.scope.pattern.display() : proposal.rationale;
  }
  out.scope.guards.clear();
  out.scope.revision = 0;
  out.scope.parent_revision.reset();
  return out;
}

RefineOutcome refine(const DeclaredScope& current, const EpisodicMemory& memory, Reasoner& reasoner,
                     const RenameRefactoring& seed) {
  if (memory.rejections_since_scope().empty()) throw std::logic_error("refine called without a new rejection");
  std::vector<ReviewRecord> reviews = memory.reviews(ReviewFilter::All);
  RefineProposal proposal = reasoner.refine_guards(current, reviews);
  RefineOutcome out;
  out.warnings = proposal.warnings;
  DeclaredScope next = proposal.scope;

  if (!(next.pattern == current.pattern)) {
    auto mapped = apply_pattern(next.pattern, seed.old_name);
    if (!next.pattern.valid() || !mapped || *mapped != seed.new_name) {
      out.warnings.push_back("refined pattern " + next.pattern.display() + " breaks the seed; kept " +
                             current.pattern.display());
      next.pattern = current.pattern;
    }
  }

  // Guards are never silently dropped.
  for (const Guard& g : current.guards) {
    bool kept = std::any_of(next.guards.begin(), next.guards.end(), [&](const Guard& n) { return n.id == g.id; });
    if (!kept) {
      next.guards.push_back(g);
      out.warnings.push_back("restored dropped guard " + std::to_string(g.id));
    }
  }
  std::stable_sort(next.guards.begin(), next.guards.end(), [](const Guard& a, const Guard& b) { return a.id < b.id; });

  // No accepted rename may be excluded; weaken offending guards.
  std::vector<DeclFacts> accepted, rejected;
  for (const ReviewRecord& r : reviews) (r.accepted ? accepted : rejected).push_back(r.facts);
  std::vector<Guard> fixed;
  std::set<int> used_ids;
  for (const Guard& g : next.guards) used_ids.insert(g.id);
  int next_id = used_ids.empty() ? 1 : *used_ids.rbegin() + 1;
  for (const Guard& g : next.guards) {
    bool bad = std::any_of(accepted.begin(), accepted.end(), [&](const DeclFacts& a) { return g.excludes(a); });
    if (!bad) {
      fixed.push_back(g);
      continue;
    }
    ++out.guards_weakened;
    out.warnings.push_back("guard " + std::to_string(g.id) + " excluded an accepted rename; weakened");
    Guard advisory{g.id, g.description, std::nullopt};
    fixed.push_back(advisory);
    for (const DeclFacts& r : rejected) {
      if (!g.excludes(r)) continue;
      if (auto atoms = separating_guard(r, accepted)) {
        Guard exact{next_id++, describe_atoms(*atoms), *atoms};
        bool dup = std::any_of(fixed.begin(), fixed.end(),
                               [&](const Guard& f) { return f.structured && *f.structured == *exact.structured; });
        if (!dup) fixed.push_back(std::move(exact));
      }
    }
  }
  next.guards = std::move(fixed);

  int before = static_cast<int>(current.guards.size());
  out.guards_added = std::max(0, static_cast<int>(next.guards.size()) - before);
  next.revision = current.revision + 1;
  next.parent_revision = current.revision;
  if (out.guards_added == 0 && next.guards == current.guards && next.pattern == current.pattern)
    out.warnings.push_back("refinement left the scope unchanged");
  out.scope = std::move(next);
  return out;
}

}  // namespace corename
