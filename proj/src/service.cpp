#include <httplib.h>

#include <cstdlib>

#include "corename/service.hpp"

namespace corename {

std::vector<bool> InteractiveFeedback::review(const ReviewBatch& batch) {
  std::unique_lock lock(mu_);
  if (aborted_ || closed_) throw FeedbackAborted();
  pending_ = batch;
  decisions_.assign(batch.items.size(), std::nullopt);
  auto done = [&] {
    return aborted_ ||
           std::all_of(decisions_.begin(), decisions_.end(), [](const auto& d) { return d.has_value(); });
  };
  bool finished = timeout_ ? cv_.wait_for(lock, *timeout_, done) : (cv_.wait(lock, done), true);
  for (const ReviewItem& item : batch.items) past_ids_.push_back(item.id);
  if (!finished || aborted_) {
    aborted_ = true;
    pending_.reset();
    throw FeedbackAborted();
  }
  std::vector<bool> out;
  for (const auto& d : decisions_) out.push_back(*d);
  pending_.reset();
  decisions_.clear();
  return out;
}

DecisionStatus InteractiveFeedback::decide(int item_id, bool accept) {
  std::lock_guard lock(mu_);
  if (closed_ || aborted_) return DecisionStatus::Gone;
  if (pending_) {
    for (std::size_t i = 0; i < pending_->items.size(); ++i) {
      if (pending_->items[i].id != item_id) continue;
      if (decisions_[i]) return DecisionStatus::Conflict;
      decisions_[i] = accept;
      cv_.notify_all();
      return DecisionStatus::Ok;
    }
  }
  if (std::find(past_ids_.begin(), past_ids_.end(), item_id) != past_ids_.end()) return DecisionStatus::Conflict;
  return DecisionStatus::NotFound;
}

json InteractiveFeedback::pending_json() const {
  std::lock_guard lock(mu_);
  if (!pending_) return nullptr;
  json j = *pending_;
  for (std::size_t i = 0; i < pending_->items.size(); ++i)
    j["items"][i]["decision"] = decisions_[i] ? json(*decisions_[i] ? "accept" : "reject") : json(nullptr);
  return j;
}

std::optional<ReviewBatch> InteractiveFeedback::pending() const {
  std::lock_guard lock(mu_);
  return pending_;
}

void InteractiveFeedback::abort() {
  std::lock_guard lock(mu_);
  aborted_ = true;
  cv_.notify_all();
}

void InteractiveFeedback::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

bool InteractiveFeedback::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

ServiceOptions service_options_from_env(ServiceOptions base) {
  if (const char* bind = std::getenv("CORENAME_BIND"); bind && *bind) {
    std::string b(bind);
    auto colon = b.rfind(':');
    if (colon == std::string::npos) {
      base.host = b;
    } else {
      base.host = b.substr(0, colon);
      base.port = std::stoi(b.substr(colon + 1));
    }
  }
  if (const char* token = std::getenv("CORENAME_SERVICE_TOKEN"); token && *token) base.token = token;
  return base;
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

bool session_over(const std::string& status) { return status == "completed" || status == "aborted"; }

}  // namespace

SessionService::SessionService(Session& session, InteractiveFeedback& feedback, ServiceOptions options)
    : session_(session), feedback_(feedback), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  routes();
}

SessionService::~SessionService() { stop(); }

std::string SessionService::url() const { return "http://" + options_.host + ":" + std::to_string(port_); }

bool SessionService::start() {
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
    if (port_ <= 0) return false;
  } else {
    if (!server_->bind_to_port(options_.host, options_.port)) return false;
    port_ = options_.port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return true;
}

void SessionService::stop() {
  stopping_ = true;
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void SessionService::routes() {
  httplib::Server& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                         {"Access-Control-Allow-Headers", "Content-Type, Authorization, Last-Event-ID"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  s.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (options_.token.empty() || req.method == "OPTIONS") return httplib::Server::HandlerResponse::Unhandled;
    if (req.get_header_value("Authorization") == "Bearer " + options_.token ||
        req.get_param_value("token") == options_.token)
      return httplib::Server::HandlerResponse::Unhandled;
    send_error(res, 401, "missing or wrong token");
    return httplib::Server::HandlerResponse::Handled;
  });

  s.Get("/session", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", session_.status()},
                    {"seed", session_.seed()},
                    {"config", session_.config()},
                    {"counters", session_.counters()},
                    {"visited", session_.visited()},
                    {"awaiting_decision", feedback_.pending().has_value()}});
  });

  s.Get("/scope", [this](const httplib::Request&, httplib::Response& res) {
    auto history = session_.memory().scope_history();
    json current = history.empty() ? json(nullptr) : json(history.back());
    send_json(res, {{"current", current}, {"history", history}});
  });

  s.Get("/suggestions", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"status", session_.status()}, {"batch", feedback_.pending_json()}});
  });

  s.Post(R"(/suggestions/(\d+)/decision)", [this](const httplib::Request& req, httplib::Response& res) {
    int id = std::stoi(req.matches[1].str());
    json body = json::parse(req.body, nullptr, false);
    bool accept = false;
    if (body.is_object() && body.contains("decision") && body["decision"].is_string() &&
        (body["decision"] == "accept" || body["decision"] == "reject")) {
      accept = body["decision"] == "accept";
    } else if (body.is_object() && body.contains("accept") && body["accept"].is_boolean()) {
      accept = body["accept"].get<bool>();
    } else {
      send_error(res, 400, "body must be {\"decision\": \"accept\" | \"reject\"}");
      return;
    }
    switch (feedback_.decide(id, accept)) {
      case DecisionStatus::Ok: send_json(res, {{"id", id}, {"decision", accept ? "accept" : "reject"}}); break;
      case DecisionStatus::NotFound: send_error(res, 404, "unknown suggestion " + std::to_string(id)); break;
      case DecisionStatus::Conflict: send_error(res, 409, "decision already recorded"); break;
      case DecisionStatus::Gone: send_error(res, 410, "session closed"); break;
    }
  });

  s.Get("/changes", [this](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"changes", session_.changes()}, {"diff", session_.unified_diff()}});
  });

  s.Post("/session/abort", [this](const httplib::Request&, httplib::Response& res) {
    if (session_over(session_.status()) || feedback_.closed()) {
      send_error(res, 410, "session closed");
      return;
    }
    feedback_.abort();
    send_json(res, {{"status", "aborting"}});
  });

  s.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
    int after = 0;
    if (req.has_param("after")) after = std::stoi(req.get_param_value("after"));
    else if (req.has_header("Last-Event-ID")) after = std::stoi(req.get_header_value("Last-Event-ID"));
    if (req.get_param_value("stream") == "0") {
      json out = json::array();
      for (const SessionEvent& e : session_.events().events())
        if (e.seq > after) out.push_back(e);
      send_json(res, out);
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    auto cursor = std::make_shared<int>(after);
    res.set_chunked_content_provider("text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
      EventLog& log = session_.events();
      auto batch = log.wait_after(*cursor, std::chrono::milliseconds(500));
      for (const SessionEvent& e : batch) {
        std::string frame = "id: " + std::to_string(e.seq) + "\nevent: " + e.type + "\ndata: " + json(e).dump() + "\n\n";
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = e.seq;
      }
      if (batch.empty() && (log.closed() || stopping_)) {
        sink.done();
        return true;
      }
      if (stopping_) return false;
      return true;
    });
  });
}

}  // namespace corename
