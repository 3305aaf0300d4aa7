#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "corename/feedback.hpp"
#include "corename/orchestrator.hpp"

namespace httplib {
class Server;
}

namespace corename {

enum class DecisionStatus { Ok, NotFound, Conflict, Gone };

/// Feedback channel fed by HTTP decisions. review() blocks until every item
/// of the batch is decided, the session is aborted, or the timeout expires.
class InteractiveFeedback : public FeedbackSource {
 public:
  explicit InteractiveFeedback(std::optional<std::chrono::milliseconds> timeout = std::nullopt)
      : timeout_(timeout) {}
  std::string name() const override { return "interactive"; }
  std::vector<bool> review(const ReviewBatch& batch) override;

  DecisionStatus decide(int item_id, bool accept);
  /// Pending batch with the decisions recorded so far; null when idle.
  json pending_json() const;
  std::optional<ReviewBatch> pending() const;
  void abort();
  /// Marks the session finished: later decisions answer Gone.
  void close();
  bool closed() const;

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::optional<std::chrono::milliseconds> timeout_;
  std::optional<ReviewBatch> pending_;
  std::vector<std::optional<bool>> decisions_;
  std::vector<int> past_ids_;
  bool aborted_ = false;
  bool closed_ = false;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8765;  // 0 picks a free port
  std::string token;  // required as a bearer token when non-empty
  std::string cors_origin = "*";
};

/// Reads CORENAME_BIND (host:port) and CORENAME_SERVICE_TOKEN into `base`.
ServiceOptions service_options_from_env(ServiceOptions base);

/// HTTP+JSON facade over a live session. Endpoint schemas are in docs/protocol.md.
class SessionService {
 public:
  SessionService(Session& session, InteractiveFeedback& feedback, ServiceOptions options = {});
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  /// Binds and serves on a background thread; false when the address is taken.
  bool start();
  void stop();
  int port() const { return port_; }
  std::string url() const;

 private:
  void routes();

  Session& session_;
  InteractiveFeedback& feedback_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace corename
