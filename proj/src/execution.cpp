#include <algorithm>

#include "corename/execution.hpp"
#include "corename/scope_agent.hpp"

namespace corename {

void to_json(json& j, const Counters& c) {
  j = json{{"llm_calls", c.llm_calls},         {"tool_calls", c.tool_calls},
           {"files_inspected", c.files_inspected}, {"suggestions_offered", c.suggestions_offered},
           {"accepted", c.accepted},           {"rejected", c.rejected},
           {"actions", c.actions}};
}

void to_json(json& j, const ReviewItem& item) {
  j = json{{"id", item.id},
           {"rename", item.rename},
           {"decl_id", item.decl_id},
           {"group_size", item.group_size},
           {"pattern_mismatch", item.pattern_mismatch},
           {"snippet", item.snippet},
           {"context_start", item.context_start},
           {"context", item.context},
           {"highlight", {{"line", item.rename.line_number}, {"begin", item.highlight_begin}, {"end", item.highlight_end}}}};
}

void to_json(json& j, const ReviewBatch& batch) {
  j = json{{"file", batch.file}, {"iteration", batch.iteration}, {"items", batch.items}};
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ReasonerEmpty: return "reasoner_empty";
    case Termination::IterationCap: return "iteration_cap";
    case Termination::AllOffered: return "all_offered";
    case Termination::ToolFailures: return "tool_failures";
    case Termination::Aborted: return "aborted";
  }
  return "?";
}

std::string fingerprint(const RenameRefactoring& r) {
  return r.file_path + "\x1f" + std::to_string(r.line_number) + "\x1f" + r.old_name + "\x1f" + r.new_name + "\x1f" +
         std::string(to_string(r.identifier_type));
}

ReviewItem make_review_item(const CodeModel& model, const ValidatedRename& v, int id) {
  ReviewItem item;
  item.id = id;
  item.rename = v.rename;
  item.decl_id = v.target.value;
  item.canonical_id = model.canonical(v.target).value;
  item.group_size = static_cast<int>(v.group.size());
  item.pattern_mismatch = v.pattern_mismatch;
  const Declaration& d = model.decl(v.target);
  const SourceFile* src = model.layout().find(d.file);
  if (src) {
    item.snippet = std::string(src->line_text(d.line));
    item.context_start = std::max(1, d.line - 5);
    int last = std::min(src->line_count(), d.line + 5);
    for (int l = item.context_start; l <= last; ++l) item.context.emplace_back(src->line_text(l));
    std::size_t line_begin = src->line_index.at(static_cast<std::size_t>(d.line - 1));
    item.highlight_begin = static_cast<int>(d.span.begin - line_begin);
    item.highlight_end = static_cast<int>(d.span.end - line_begin);
  }
  return item;
}

namespace {

json suggestion_json(const Suggestion& s) { return json(s); }

}  // namespace

PlanResult plan_and_execute(const std::string& file, ExecutionContext& ctx) {
  PlanResult result;
  result.state.file = file;
  FilePlanState& st = result.state;

  for (st.iteration = 1;; ++st.iteration) {
    ctx.events.emit("plan_iteration", {{"file", file}, {"iteration", st.iteration}});
    ctx.bump(&Counters::actions);
    DeclaredScope scope = ctx.memory.current_scope();
    std::vector<Suggestion> suggestions;
    {
      std::lock_guard lock(ctx.workspace_mu);
      suggestions = ctx.reasoner.find_candidates(ctx.workspace.model(), file, scope, ctx.memory.shots());
    }
    if (suggestions.empty()) {
      result.termination = Termination::ReasonerEmpty;
      break;
    }

    Validation val;
    {
      std::lock_guard lock(ctx.workspace_mu);
      val = validate(suggestions, ctx.workspace.model(), file, &scope,
                     [&](const RenameRefactoring& r) { return ctx.workspace.check(r); });
    }
    for (const DroppedSuggestion& d : val.dropped) {
      ++st.tool_failures;
      RenameRefactoring as_rename{file, d.suggestion.identifier_name, d.suggestion.new_name,
                                  d.suggestion.line_number, d.suggestion.identifier_type};
      st.offered.insert(fingerprint(as_rename));
      ctx.events.emit("suggestion_dropped", {{"file", file},
                                             {"suggestion", suggestion_json(d.suggestion)},
                                             {"reason", to_string(d.reason)},
                                             {"detail", d.detail}});
    }

    ReviewBatch batch{file, st.iteration, {}};
    std::vector<ValidatedRename> fresh;
    {
      std::lock_guard lock(ctx.workspace_mu);
      // A pattern whose new text contains the old one would match its own output.
      std::set<DeclId> renamed;
      for (DeclId t : ctx.workspace.changes().targets) renamed.insert(ctx.workspace.model().canonical(t));
      for (ValidatedRename& v : val.valid) {
        std::string fp = fingerprint(v.rename);
        if (ctx.offered.count(fp) || st.offered.count(fp)) continue;
        if (renamed.count(ctx.workspace.model().canonical(v.target))) {
          st.offered.insert(fp);
          ctx.events.emit("suggestion_dropped", {{"file", file},
                                                 {"suggestion", suggestion_json(v.source)},
                                                 {"reason", to_string(DropReason::AlreadyRenamed)},
                                                 {"detail", "declaration was renamed earlier in this session"}});
          continue;
        }
        st.offered.insert(fp);
        ctx.offered.insert(fp);
        batch.items.push_back(make_review_item(ctx.workspace.model(), v, ctx.next_item_id++));
        fresh.push_back(std::move(v));
      }
    }
    if (fresh.empty()) {
      result.termination =
          st.tool_failures >= ctx.tool_failure_cap ? Termination::ToolFailures : Termination::AllOffered;
      break;
    }
    std::vector<std::size_t> order(fresh.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return batch.items[a].rename.line_number < batch.items[b].rename.line_number;
    });
    {
      ReviewBatch sorted{file, st.iteration, {}};
      std::vector<ValidatedRename> sorted_fresh;
      for (std::size_t i : order) {
        sorted.items.push_back(batch.items[i]);
        sorted_fresh.push_back(fresh[i]);
      }
      batch = std::move(sorted);
      fresh = std::move(sorted_fresh);
    }
    ctx.bump(&Counters::suggestions_offered, static_cast<int>(batch.items.size()));
    ctx.offered_items.insert(ctx.offered_items.end(), batch.items.begin(), batch.items.end());
    ctx.events.emit("suggestions_offered", {{"file", file}, {"iteration", st.iteration}, {"items", batch.items}});

    std::vector<bool> decisions;
    try {
      decisions = ctx.feedback.review(batch);
    } catch (const FeedbackAborted&) {
      result.termination = Termination::Aborted;
      throw;
    }
    if (decisions.size() != batch.items.size()) throw std::runtime_error("feedback returned a wrong-sized decision list");

    bool rejected = false;
    for (std::size_t i = 0; i < batch.items.size(); ++i) {
      const ReviewItem& item = batch.items[i];
      bool ok = decisions[i];
      ctx.events.emit("decision_recorded", {{"id", item.id}, {"decision", ok ? 1 : 0}});
      DeclFacts facts;
      {
        std::lock_guard lock(ctx.workspace_mu);
        facts = facts_of(ctx.workspace.model().decl(fresh[i].target));
      }
      int seq = ctx.memory.append_review({item.rename, ok, item.snippet, facts, item.decl_id});
      ctx.events.emit("review_appended",
                      {{"item", item.id}, {"memory_seq", seq}, {"rename", item.rename}, {"decision", ok ? 1 : 0}});
      ctx.bump(ok ? &Counters::accepted : &Counters::rejected);
      rejected |= !ok;
    }

    for (std::size_t i = 0; i < batch.items.size(); ++i) {
      if (!decisions[i]) continue;
      const ReviewItem& item = batch.items[i];
      std::lock_guard lock(ctx.workspace_mu);
      try {
        ChangeSet delta = ctx.workspace.apply(item.rename);
        result.applied.push_back(delta.applied.front());
        ctx.events.emit("rename_applied",
                        {{"item", item.id}, {"rename", delta.applied.front()}, {"version", delta.model_versions.front()}});
        auto edits = ctx.workspace.update_comment(file, item.rename.old_name, item.rename.new_name);
        if (!edits.empty()) ctx.events.emit("comment_updated", {{"item", item.id}, {"file", file}, {"edits", edits}});
      } catch (const PreconditionViolated& e) {
        ++st.tool_failures;
        ctx.events.emit("rename_failed", {{"item", item.id}, {"rename", item.rename}, {"violations", e.violations()}});
      }
    }

    if (rejected) {
      result.rejected_any = true;
      if (ctx.on_rejection) ctx.on_rejection();
    }
    if (st.tool_failures >= ctx.tool_failure_cap) {
      result.termination = Termination::ToolFailures;
      break;
    }
    if (st.iteration >= ctx.per_file_cap) {
      result.termination = Termination::IterationCap;
      break;
    }
  }
  return result;
}

}  // namespace corename
