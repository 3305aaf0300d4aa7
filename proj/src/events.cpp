#include <map>
#include <set>

#include "corename/events.hpp"

namespace corename {

void to_json(json& j, const SessionEvent& e) { j = json{{"seq", e.seq}, {"type", e.type}, {"data", e.data}}; }

void from_json(const json& j, SessionEvent& e) {
  j.at("seq").get_to(e.seq);
  j.at("type").get_to(e.type);
  e.data = j.value("data", json::object());
}

EventLog::EventLog(std::optional<std::string> path) {
  if (path) {
    out_.emplace(*path, std::ios::binary | std::ios::trunc);
    if (!*out_) throw std::runtime_error("cannot open event log " + *path);
  }
}

int EventLog::emit(std::string type, json data) {
  std::lock_guard lock(mu_);
  if (closed_) return 0;
  SessionEvent e{static_cast<int>(events_.size()) + 1, std::move(type), std::move(data)};
  if (out_) {
    *out_ << json(e).dump() << '\n';
    out_->flush();
  }
  events_.push_back(std::move(e));
  cv_.notify_all();
  return events_.back().seq;
}

std::vector<SessionEvent> EventLog::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::vector<SessionEvent> EventLog::wait_after(int after, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || static_cast<int>(events_.size()) > after; });
  std::vector<SessionEvent> out;
  for (std::size_t i = static_cast<std::size_t>(std::max(after, 0)); i < events_.size(); ++i) out.push_back(events_[i]);
  return out;
}

void EventLog::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  if (out_) out_->close();
  cv_.notify_all();
}

bool EventLog::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

std::string EventLog::serialize() const {
  std::lock_guard lock(mu_);
  std::string out;
  for (const SessionEvent& e : events_) out += json(e).dump() + "\n";
  return out;
}

std::vector<SessionEvent> EventLog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read event log " + path);
  std::vector<SessionEvent> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line).get<SessionEvent>());
  return out;
}

// ─── Log validator ─────────────────────────────────────────────

namespace {

enum class Phase { Start, Seeded, SeedReviewed, Scoped, Idle, Planning, Batch, AfterFile, Done };

struct Checker {
  std::vector<LogViolation> out;
  Phase phase = Phase::Start;
  std::set<std::string> enqueued, planned;
  std::string current_file;
  std::set<int> pending_decisions;  // batch items awaiting a decision
  std::set<int> awaiting_review;    // decided, review not yet appended
  std::map<int, bool> decided;      // item -> accepted
  int batch_rejections = 0;
  int rejections_since_scope = 0;
  int scope_revision = -1;
  bool refined_this_batch = false;
  bool discovered = true;

  void fail(const SessionEvent& e, std::string msg) { out.push_back({e.seq, e.type + ": " + std::move(msg)}); }

  void close_batch(const SessionEvent& e) {
    if (phase != Phase::Batch) return;
    if (!pending_decisions.empty() || !awaiting_review.empty())
      fail(e, "batch closed with undecided or unrecorded items");
    if (batch_rejections > 0 && !refined_this_batch) fail(e, "rejection without refinement");
    phase = Phase::Planning;
  }

  void step(const SessionEvent& e) {
    const std::string& t = e.type;
    if (t == "warning") return;
    if (phase == Phase::Done) {
      fail(e, "event after session_done");
      return;
    }
    if (t == "session_started") {
      if (phase != Phase::Start) fail(e, "session started twice");
      phase = Phase::Seeded;
      return;
    }
    if (phase == Phase::Start) {
      fail(e, "expected session_started first");
      phase = Phase::Seeded;
    }
    if (t == "seed_applied" || t == "seed_preapplied") {
      if (phase != Phase::Seeded) fail(e, "seed handled out of order");
      phase = Phase::SeedReviewed;
      return;
    }
    if (t == "review_appended") {
      if (phase == Phase::SeedReviewed) {
        if (e.data.value("decision", -1) != 1) fail(e, "seed review must be an accept");
        phase = Phase::Scoped;
        return;
      }
      if (phase != Phase::Batch) {
        fail(e, "review outside a batch");
        return;
      }
      int id = e.data.value("item", -1);
      if (!awaiting_review.erase(id)) fail(e, "review for an item without a decision");
      if (e.data.value("decision", -1) == 0) {
        ++batch_rejections;
        ++rejections_since_scope;
      }
      return;
    }
    if (t == "scope_inferred") {
      if (phase != Phase::Scoped) fail(e, "scope@0 must follow the seed accept");
      if (e.data.value("revision", -1) != 0) fail(e, "initial scope must be revision 0");
      scope_revision = 0;
      rejections_since_scope = 0;
      phase = Phase::Idle;
      return;
    }
    if (phase == Phase::Seeded || phase == Phase::SeedReviewed || phase == Phase::Scoped) {
      fail(e, "session body before seed accept and scope@0");
      phase = Phase::Idle;
    }
    if (t == "file_enqueued") {
      if (phase != Phase::Idle && phase != Phase::AfterFile) fail(e, "enqueue outside discovery");
      std::string f = e.data.value("file", "");
      if (planned.count(f)) fail(e, "re-enqueued a planned file " + f);
      if (phase == Phase::Idle && !planned.empty()) fail(e, "enqueue without discovery");
      if (phase == Phase::AfterFile && !discovered) fail(e, "enqueue before discovery");
      enqueued.insert(f);
      return;
    }
    if (t == "file_plan_started") {
      if (phase != Phase::Idle && phase != Phase::AfterFile) fail(e, "plan started inside another plan");
      if (!discovered) fail(e, "next file planned before discovery");
      std::string f = e.data.value("file", "");
      if (!enqueued.count(f)) fail(e, "planned file was never enqueued: " + f);
      if (!planned.insert(f).second) fail(e, "file planned twice: " + f);
      current_file = f;
      phase = Phase::Planning;
      return;
    }
    if (t == "plan_iteration") {
      close_batch(e);
      if (phase != Phase::Planning) fail(e, "iteration outside a plan");
      return;
    }
    if (t == "suggestion_dropped") {
      if (phase != Phase::Planning) fail(e, "drop outside a plan iteration");
      return;
    }
    if (t == "suggestions_offered") {
      if (phase != Phase::Planning) fail(e, "offer outside a plan iteration");
      phase = Phase::Batch;
      pending_decisions.clear();
      awaiting_review.clear();
      decided.clear();
      batch_rejections = 0;
      refined_this_batch = false;
      for (const json& item : e.data.value("items", json::array())) pending_decisions.insert(item.value("id", -1));
      if (pending_decisions.empty()) fail(e, "empty batch offered");
      return;
    }
    if (t == "decision_recorded") {
      if (phase != Phase::Batch) {
        fail(e, "decision outside a batch");
        return;
      }
      int id = e.data.value("id", -1);
      if (!pending_decisions.erase(id)) fail(e, "decision for unknown or decided item");
      bool accepted = e.data.value("decision", -1) == 1;
      decided[id] = accepted;
      awaiting_review.insert(id);
      return;
    }
    if (t == "rename_applied" || t == "rename_failed") {
      if (phase != Phase::Batch) {
        fail(e, "apply outside a batch");
        return;
      }
      int id = e.data.value("item", -1);
      auto it = decided.find(id);
      if (it == decided.end() || !it->second) fail(e, "apply of an item that was not accepted");
      if (awaiting_review.count(id)) fail(e, "apply before the review was appended");
      if (refined_this_batch) fail(e, "apply after refinement in the same batch");
      return;
    }
    if (t == "comment_updated") {
      if (phase != Phase::Batch) fail(e, "comment update outside a batch");
      return;
    }
    if (t == "scope_refined") {
      if (phase != Phase::Batch) fail(e, "refinement outside a batch");
      if (rejections_since_scope == 0) fail(e, "refinement without a rejection");
      if (!pending_decisions.empty() || !awaiting_review.empty()) fail(e, "refinement before all reviews");
      int rev = e.data.value("revision", -1);
      if (rev != scope_revision + 1) fail(e, "scope revision does not increase by one");
      scope_revision = rev;
      rejections_since_scope = 0;
      refined_this_batch = true;
      return;
    }
    if (t == "file_done") {
      close_batch(e);
      if (phase != Phase::Planning) fail(e, "file_done outside a plan");
      if (e.data.value("file", "") != current_file) fail(e, "file_done for a different file");
      phase = Phase::AfterFile;
      discovered = false;
      return;
    }
    if (t == "discovery") {
      if (phase != Phase::AfterFile || discovered) fail(e, "discovery must follow file_done");
      discovered = true;
      return;
    }
    if (t == "session_done") {
      if (phase == Phase::Batch || phase == Phase::Planning) {
        if (e.data.value("status", "") != "aborted") fail(e, "session ended inside a plan");
      } else if (!discovered && e.data.value("status", "") != "aborted") {
        fail(e, "session ended before discovery");
      }
      phase = Phase::Done;
      return;
    }
    fail(e, "unknown event type");
  }
};

}  // namespace

std::vector<LogViolation> validate_event_log(const std::vector<SessionEvent>& events) {
  Checker c;
  int last_seq = 0;
  for (const SessionEvent& e : events) {
    if (e.seq != last_seq + 1) c.out.push_back({e.seq, "sequence gap"});
    last_seq = e.seq;
    c.step(e);
  }
  if (c.phase != Phase::Done) c.out.push_back({last_seq, "missing session_done"});
  return c.out;
}

}  // namespace corename
