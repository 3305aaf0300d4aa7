#include <filesystem>
#include <fstream>

#include "corename/orchestrator.hpp"
#include "corename/scope_agent.hpp"

namespace corename {

namespace fs = std::filesystem;

std::string_view to_string(FeedbackMode mode) {
  switch (mode) {
    case FeedbackMode::Interactive: return "interactive";
    case FeedbackMode::Oracle: return "oracle";
    case FeedbackMode::AutoAccept: return "auto_accept";
    case FeedbackMode::Scripted: return "scripted";
  }
  return "?";
}

void to_json(json& j, const SessionConfig& c) {
  j = json{{"K", c.K},
           {"rounds_cap", c.rounds_cap},
           {"per_file_cap", c.per_file_cap},
           {"tool_failure_cap", c.tool_failure_cap},
           {"feedback_mode", to_string(c.feedback_mode)},
           {"reasoner_mode", c.reasoner_mode},
           {"materialize", c.materialize},
           {"replication", c.replication},
           {"seed_preapplied", c.seed_preapplied},
           {"initial_guards", c.initial_guards}};
}

void to_json(json& j, const SessionResult& r) {
  j = json{{"status", r.status},
           {"c_star", r.c_star},
           {"counters", r.counters},
           {"visited", r.visited},
           {"warnings", r.warnings},
           {"pattern_inconsistent", r.pattern_inconsistent},
           {"reasoner_degraded", r.reasoner_degraded}};
  if (!r.scopes.empty()) j["scope"] = r.scopes.back();
  if (r.events_path) j["events_path"] = *r.events_path;
}

Session::Session(CodeModel model, RenameRefactoring seed, SessionConfig config, Reasoner& reasoner,
                 FeedbackSource& feedback)
    : seed_(std::move(seed)), config_(std::move(config)), reasoner_(reasoner), feedback_(feedback) {
  if (config_.K < 1 || config_.rounds_cap < 1 || config_.per_file_cap < 1 || config_.tool_failure_cap < 1)
    throw std::invalid_argument("session caps must be >= 1");
  std::optional<std::string> events_path, memory_path;
  if (config_.session_dir) {
    fs::create_directories(*config_.session_dir);
    events_path = (fs::path(*config_.session_dir) / "events.jsonl").string();
    memory_path = (fs::path(*config_.session_dir) / "memory.jsonl").string();
  }
  workspace_ = std::make_unique<Workspace>(std::move(model), config_.materialize);
  memory_ = std::make_unique<EpisodicMemory>(memory_path);
  events_ = std::make_unique<EventLog>(events_path);
}

Session::~Session() = default;

std::string Session::status() const {
  std::lock_guard lock(state_mu_);
  return status_;
}

void Session::set_status(std::string s) {
  std::lock_guard lock(state_mu_);
  status_ = std::move(s);
}

Counters Session::counters() const {
  std::lock_guard lock(state_mu_);
  Counters c = counters_;
  c.llm_calls = reasoner_.calls();
  {
    std::lock_guard ws_lock(workspace_mu_);
    c.tool_calls = workspace_->tool_calls();
  }
  return c;
}

ChangeSet Session::changes() const {
  std::lock_guard lock(workspace_mu_);
  return workspace_->changes();
}

std::string Session::unified_diff() const {
  std::lock_guard lock(workspace_mu_);
  return workspace_->unified_diff();
}

std::vector<std::string> Session::visited() const {
  std::lock_guard lock(state_mu_);
  return visited_;
}

void Session::refine_now() {
  DeclaredScope current = memory_->current_scope();
  RefineOutcome out = refine(current, *memory_, reasoner_, seed_);
  for (const std::string& w : out.warnings) {
    warnings_.push_back(w);
    events_->emit("warning", {{"message", w}});
  }
  memory_->append_scope(out.scope);
  events_->emit("scope_refined", {{"revision", out.scope.revision},
                                  {"parent_revision", current.revision},
                                  {"guards_added", out.guards_added},
                                  {"guards_weakened", out.guards_weakened},
                                  {"scope", out.scope}});
  std::lock_guard lock(state_mu_);
  ++counters_.actions;
}

void Session::enqueue(const std::string& file, int generation, const std::string& source) {
  {
    std::lock_guard lock(state_mu_);
    if (!enqueued_.insert(file).second) return;
    queue_.emplace_back(file, generation);
  }
  events_->emit("file_enqueued", {{"file", file}, {"generation", generation}, {"source", source}});
}

SessionResult Session::run() {
  set_status("running");
  events_->emit("session_started", {{"seed", seed_}, {"config", config_}});

  // Seed intake: apply (or accept as pre-applied), then the implicit accept.
  RenameRefactoring seed = seed_;
  DeclFacts seed_facts;
  std::uint32_t seed_decl = 0;
  std::string snippet;
  {
    std::lock_guard lock(workspace_mu_);
    const CodeModel& m = workspace_->model();
    auto target = find_target(m, seed, config_.seed_preapplied);
    if (!target) throw SeedUnresolvable("seed does not resolve: " + to_string(seed));
    const Declaration& d = m.decl(*target);
    seed.line_number = d.line;
    seed_facts = facts_of(d);
    seed_facts.name = seed.old_name;
    seed_decl = target->value;
    snippet = std::string(m.layout().find(d.file)->line_text(d.line));
    if (config_.seed_preapplied) {
      workspace_->record_preapplied(seed, *target);
    } else {
      try {
        workspace_->apply(seed);
      } catch (const PreconditionViolated& e) {
        throw SeedUnresolvable(std::string("seed cannot be applied: ") + e.what());
      }
      workspace_->update_comment(seed.file_path, seed.old_name, seed.new_name);
    }
  }
  events_->emit(config_.seed_preapplied ? "seed_preapplied" : "seed_applied", {{"rename", seed}});
  int seq = memory_->append_review({seed, true, snippet, seed_facts, seed_decl});
  events_->emit("review_appended", {{"seed", true}, {"memory_seq", seq}, {"rename", seed}, {"decision", 1}});

  // Scope@0.
  std::string context;
  {
    std::lock_guard lock(workspace_mu_);
    context = workspace_->model().layout().find(seed.file_path)->text;
  }
  InferOutcome inferred = infer_from_seed(seed, context, reasoner_);
  DeclaredScope scope = inferred.scope;
  for (const Guard& g : config_.initial_guards) {
    Guard copy = g;
    copy.id = scope.next_guard_id();
    scope.guards.push_back(std::move(copy));
  }
  memory_->append_scope(scope);
  events_->emit("scope_inferred",
                {{"revision", 0}, {"scope", scope}, {"pattern_inconsistent", inferred.pattern_inconsistent}});
  if (inferred.pattern_inconsistent) {
    warnings_.push_back(inferred.detail);
    events_->emit("warning", {{"message", "pattern_inconsistent: " + inferred.detail}});
  }

  enqueue(seed.file_path, 0, "seed");

  ExecutionContext ctx{*workspace_, workspace_mu_, *memory_,     reasoner_,     feedback_,
                       *events_,    counters_,     state_mu_,    offered_fps_,  next_item_id_,
                       offered_items_, [this] { refine_now(); }, config_.per_file_cap, config_.tool_failure_cap};

  std::string status = "completed";
  int plans = 0;
  try {
    while (true) {
      std::pair<std::string, int> item;
      {
        std::lock_guard lock(state_mu_);
        if (queue_head_ >= queue_.size()) break;
        if (plans >= config_.K) break;
        item = queue_[queue_head_++];
        visited_.push_back(item.first);
        ++counters_.files_inspected;
      }
      ++plans;
      const auto& [file, generation] = item;
      events_->emit("file_plan_started", {{"file", file}, {"generation", generation}});
      PlanResult plan = plan_and_execute(file, ctx);
      events_->emit("file_done", {{"file", file},
                                  {"applied", plan.applied},
                                  {"iterations", plan.state.iteration},
                                  {"tool_failures", plan.state.tool_failures},
                                  {"termination", to_string(plan.termination)}});

      json disc{{"after_file", file}, {"round", generation + 1}};
      if (!config_.replication) {
        disc["skipped"] = "replication_disabled";
        events_->emit("discovery", disc);
        continue;
      }
      if (generation >= config_.rounds_cap) {
        disc["skipped"] = "rounds_cap";
        events_->emit("discovery", disc);
        continue;
      }
      Discovery d;
      std::set<std::string> seen;
      {
        std::lock_guard lock(state_mu_);
        seen = enqueued_;
      }
      {
        std::lock_guard lock(workspace_mu_);
        d = discover_and_filter(workspace_->model(), memory_->current_scope(), workspace_->changes(), seen,
                                reasoner_, &slices_);
      }
      {
        std::lock_guard lock(state_mu_);
        ++counters_.actions;
      }
      json dj = d;
      disc.update(dj);
      events_->emit("discovery", disc);
      for (const std::string& f : d.next) enqueue(f, generation + 1, "discovery");
    }
  } catch (const FeedbackAborted&) {
    status = "aborted";
  }

  {
    std::lock_guard lock(state_mu_);
    if (status == "completed" && queue_head_ < queue_.size()) {
      warnings_.push_back("file-plan cap K reached with " + std::to_string(queue_.size() - queue_head_) +
                          " file(s) still queued");
      events_->emit("warning", {{"message", warnings_.back()}});
    }
  }
  SessionResult r;
  r.status = status;
  r.counters = counters();
  events_->emit("session_done", {{"status", status}, {"counters", r.counters}});
  events_->close();
  memory_->close();
  set_status(status);

  {
    std::lock_guard lock(workspace_mu_);
    r.c_star = workspace_->changes();
    r.final_model = std::make_shared<const CodeModel>(workspace_->model());
  }
  r.events = events_->events();
  r.event_log = events_->serialize();
  r.reviews = memory_->reviews(ReviewFilter::All);
  r.scopes = memory_->scope_history();
  r.offered = offered_items_;
  r.visited = visited();
  r.warnings = warnings_;
  r.pattern_inconsistent = inferred.pattern_inconsistent;
  if (auto* fb = dynamic_cast<FallbackReasoner*>(&reasoner_)) r.reasoner_degraded = fb->degraded();
  if (config_.session_dir) {
    r.events_path = (fs::path(*config_.session_dir) / "events.jsonl").string();
    std::ofstream out(fs::path(*config_.session_dir) / "result.json", std::ios::binary | std::ios::trunc);
    out << json(r).dump(2) << '\n';
  }
  return r;
}

SessionResult run_session(const std::string& project_root, const RenameRefactoring& seed, const SessionConfig& config,
                          Reasoner& reasoner, FeedbackSource& feedback) {
  CodeModel model;
  try {
    model = parse_project(project_root);
  } catch (const ModelError& e) {
    throw ParseFailure(e.what());
  }
  Session session(std::move(model), seed, config, reasoner, feedback);
  return session.run();
}

}  // namespace corename
